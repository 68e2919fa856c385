/** Wire types mirroring the JSON the course service returns. */

export type Condition = "blind-random" | "identified-random" | "identified-incentive";

export type Phase = "submission" | "reviewing" | "rating" | "released";

export type TaskStatus = "pending" | "reviewed" | "rated" | "expired";

export interface RoundView {
  round_id: string;
  condition: Condition;
  phase: Phase;
  k: number;
  deadlines: Record<string, string>;
  submitted?: boolean;
}

export interface PersonRef {
  participant_id: string;
  display_name: string;
}

export interface Profile extends PersonRef {
  intro: string | null;
}

export interface TaskView {
  task_id: string;
  round_id: string;
  status: TaskStatus;
  /** Present only in identified conditions. */
  author?: PersonRef;
}

export interface ReceivedReview {
  review_id: string;
  round_id: string;
  created_at: string;
  prompts: string[];
  rated: boolean;
  my_rating?: number;
  /** Present only in identified conditions. */
  reviewer?: Profile;
  /** Present only once the grade gate has cleared. */
  grade?: number;
}

export interface AuthoredReview {
  review_id: string;
  task_id: string;
  round_id: string;
  created_at: string;
  prompts: string[];
}

export interface MessageView {
  role: "reviewer" | "author";
  body: string;
  sent_at: string;
  /** Present only in identified conditions. */
  sender?: PersonRef;
}

export interface GradeReport {
  participant: string;
  round_id: string;
  per_review_grades: number[];
  aggregate: number | null;
}

export interface ReviewSubmitted {
  review_id: string;
  task_id: string;
  round_id: string;
  /** Present when the service suggests more actionable feedback. */
  nudge?: string;
}

export interface ErrorBody {
  error: string;
  detail: string;
}

/** In-memory stand-in for the course service, driven by the tests. */

import { ApiError } from "../src/api.js";
import type { ServiceClient } from "../src/app.js";
import type {
  Condition,
  GradeReport,
  MessageView,
  Phase,
  Profile,
  ReceivedReview,
  ReviewSubmitted,
  RoundView,
  TaskView,
} from "../src/types.js";

export interface FakeOptions {
  condition?: Condition;
  phase?: Phase;
  reviewCount?: number;
}

export function makeReview(id: string, identified: boolean): ReceivedReview {
  const reviewer: Profile | undefined = identified
    ? {
        participant_id: `rev-${id}`,
        display_name: `Reviewer ${id.toUpperCase()}`,
        intro: `Hi, I am reviewer ${id}.`,
      }
    : undefined;
  return {
    review_id: id,
    round_id: "r1",
    created_at: "2026-03-01T10:00:00+00:00",
    prompts: ["strong thesis", "thin evidence", "add the survey", "good draft"],
    rated: false,
    ...(reviewer ? { reviewer } : {}),
  };
}

export class FakeService implements ServiceClient {
  condition: Condition;
  phase: Phase;
  reviews: ReceivedReview[];
  gradeByReview: Record<string, number> = {};
  threads = new Map<string, MessageView[]>();
  taskList: TaskView[] = [];
  intro: string | null = null;
  nudge: string | null = null;
  failNextMessage = false;
  sentPrompts: string[][] = [];

  constructor(options: FakeOptions = {}) {
    this.condition = options.condition ?? "identified-random";
    this.phase = options.phase ?? "rating";
    const identified = this.condition !== "blind-random";
    const count = options.reviewCount ?? 3;
    this.reviews = Array.from({ length: count }, (_, i) =>
      makeReview(`v${i + 1}`, identified),
    );
    this.reviews.forEach((review, i) => {
      this.gradeByReview[review.review_id] = 70 + i * 5;
    });
  }

  private get allRated(): boolean {
    return this.reviews.every((review) => review.rated);
  }

  async round(roundId: string): Promise<RoundView> {
    return {
      round_id: roundId,
      condition: this.condition,
      phase: this.phase,
      k: 3,
      deadlines: {},
      submitted: true,
    };
  }

  async profile(participantId: string): Promise<Profile> {
    return {
      participant_id: participantId,
      display_name: "Me Myself",
      intro: this.intro,
    };
  }

  async saveIntro(participantId: string, text: string): Promise<Profile> {
    if (this.condition === "blind-random") {
      throw new ApiError(409, "BlindModeActive", "intros are disabled");
    }
    this.intro = text;
    return this.profile(participantId);
  }

  async submitWork(): Promise<unknown> {
    return {};
  }

  async tasks(): Promise<TaskView[]> {
    return this.taskList;
  }

  async submitReview(
    taskId: string,
    prompts: [string, string, string, string],
    _grade: number,
  ): Promise<ReviewSubmitted> {
    this.sentPrompts.push([...prompts]);
    this.taskList = this.taskList.filter((task) => task.task_id !== taskId);
    const result: ReviewSubmitted = {
      review_id: `authored-${taskId}`,
      task_id: taskId,
      round_id: "r1",
    };
    if (this.nudge) {
      result.nudge = this.nudge;
    }
    return result;
  }

  async feedback(): Promise<ReceivedReview[]> {
    return this.reviews.map((review) => ({
      ...review,
      ...(this.allRated
        ? { grade: this.gradeByReview[review.review_id] }
        : {}),
    }));
  }

  async rate(reviewId: string, stars: number): Promise<unknown> {
    const review = this.reviews.find((entry) => entry.review_id === reviewId);
    if (!review) {
      throw new ApiError(404, "UnknownEntity", `no review ${reviewId}`);
    }
    if (review.rated) {
      throw new ApiError(409, "AlreadyRated", "once only");
    }
    review.rated = true;
    review.my_rating = stars;
    return {};
  }

  /** Mirrors the service's gate: 409 until every received review is rated. */
  async grades(roundId: string, me: string): Promise<GradeReport> {
    if (!this.allRated) {
      throw new ApiError(409, "GradesPending", "rate all your feedback first");
    }
    const per = this.reviews.map(
      (review) => this.gradeByReview[review.review_id] ?? 0,
    );
    const sorted = [...per].sort((a, b) => a - b);
    const lowerMedian =
      sorted.length > 0 ? sorted[Math.floor((sorted.length - 1) / 2)] : null;
    return {
      participant: me,
      round_id: roundId,
      per_review_grades: per,
      aggregate: lowerMedian ?? null,
    };
  }

  async thread(reviewId: string): Promise<MessageView[]> {
    return [...(this.threads.get(reviewId) ?? [])];
  }

  async postMessage(reviewId: string, body: string): Promise<MessageView> {
    if (this.failNextMessage) {
      this.failNextMessage = false;
      throw new ApiError(409, "PhaseClosed", "threads are not open yet");
    }
    const stored: MessageView = {
      role: "author",
      body,
      sent_at: "2026-03-01T10:05:00+00:00",
    };
    const current = this.threads.get(reviewId) ?? [];
    this.threads.set(reviewId, [...current, stored]);
    return stored;
  }
}

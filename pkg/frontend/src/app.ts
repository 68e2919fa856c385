/** Session controller: owns the view state, talks to the service, no DOM. */

import { ApiError } from "./api.js";
import type {
  GradeReport,
  MessageView,
  Profile,
  ReceivedReview,
  ReviewSubmitted,
  RoundView,
  TaskView,
} from "./types.js";
import { normalizePrompts } from "./viewmodel.js";

/** The slice of the HTTP client the controller needs; tests inject fakes. */
export interface ServiceClient {
  round(roundId: string): Promise<RoundView>;
  profile(participantId: string): Promise<Profile>;
  saveIntro(participantId: string, text: string): Promise<Profile>;
  submitWork(roundId: string, contentRef: string): Promise<unknown>;
  tasks(roundId: string, me: string): Promise<TaskView[]>;
  submitReview(
    taskId: string,
    prompts: [string, string, string, string],
    grade: number,
  ): Promise<ReviewSubmitted>;
  feedback(roundId: string, me: string): Promise<ReceivedReview[]>;
  rate(reviewId: string, stars: number): Promise<unknown>;
  grades(roundId: string, me: string): Promise<GradeReport>;
  thread(reviewId: string): Promise<MessageView[]>;
  postMessage(reviewId: string, body: string): Promise<MessageView>;
}

export interface SessionState {
  me: string;
  roundId: string;
  round: RoundView | null;
  profile: Profile | null;
  tasks: TaskView[];
  feedback: ReceivedReview[];
  /** Last grades answer: a report, "pending" on GradesPending, null before any fetch. */
  grades: GradeReport | "pending" | null;
  threads: Map<string, MessageView[]>;
}

export class App {
  readonly state: SessionState;

  constructor(
    private readonly client: ServiceClient,
    me: string,
    roundId: string,
  ) {
    this.state = {
      me,
      roundId,
      round: null,
      profile: null,
      tasks: [],
      feedback: [],
      grades: null,
      threads: new Map(),
    };
  }

  /** One polling tick: refetch everything the current phase can show. */
  async refresh(): Promise<void> {
    const { me, roundId } = this.state;
    this.state.round = await this.client.round(roundId);
    this.state.profile = await this.client.profile(me);
    const phase = this.state.round.phase;
    if (phase !== "submission") {
      this.state.tasks = await this.client.tasks(roundId, me);
    }
    if (phase === "rating" || phase === "released") {
      this.state.feedback = await this.client.feedback(roundId, me);
      await this.refreshGrades();
      await this.refreshOpenThreads();
    }
  }

  private async refreshGrades(): Promise<void> {
    try {
      this.state.grades = await this.client.grades(this.state.roundId, this.state.me);
    } catch (error) {
      if (error instanceof ApiError && error.code === "GradesPending") {
        this.state.grades = "pending";
        return;
      }
      throw error;
    }
  }

  private async refreshOpenThreads(): Promise<void> {
    for (const reviewId of this.state.threads.keys()) {
      this.state.threads.set(reviewId, await this.client.thread(reviewId));
    }
  }

  async saveIntro(text: string): Promise<void> {
    this.state.profile = await this.client.saveIntro(this.state.me, text);
  }

  async submitWork(contentRef: string): Promise<void> {
    await this.client.submitWork(this.state.roundId, contentRef);
    this.state.round = await this.client.round(this.state.roundId);
  }

  /** Sends a review; returns the service's nudge text, if any. */
  async submitReview(
    taskId: string,
    fields: [string, string, string, string],
    grade: number,
  ): Promise<string | null> {
    const result = await this.client.submitReview(
      taskId,
      normalizePrompts(fields),
      grade,
    );
    this.state.tasks = await this.client.tasks(this.state.roundId, this.state.me);
    return result.nudge ?? null;
  }

  /** Rates a review, then refetches feedback and the grade gate. */
  async rate(reviewId: string, stars: number): Promise<void> {
    await this.client.rate(reviewId, stars);
    this.state.feedback = await this.client.feedback(this.state.roundId, this.state.me);
    await this.refreshGrades();
  }

  async openThread(reviewId: string): Promise<void> {
    this.state.threads.set(reviewId, await this.client.thread(reviewId));
  }

  closeThread(reviewId: string): void {
    this.state.threads.delete(reviewId);
  }

  /**
   * Optimistic message post: the draft shows immediately, then the entry is
   * reconciled with (replaced by) whatever the service stored.
   */
  async postMessage(reviewId: string, body: string): Promise<void> {
    const current = this.state.threads.get(reviewId) ?? [];
    const optimistic: MessageView = {
      role: "author",
      body,
      sent_at: "sending",
    };
    this.state.threads.set(reviewId, [...current, optimistic]);
    try {
      const stored = await this.client.postMessage(reviewId, body);
      const thread = this.state.threads.get(reviewId) ?? [];
      this.state.threads.set(
        reviewId,
        thread.map((message) => (message === optimistic ? stored : message)),
      );
    } catch (error) {
      const thread = this.state.threads.get(reviewId) ?? [];
      this.state.threads.set(
        reviewId,
        thread.filter((message) => message !== optimistic),
      );
      throw error;
    }
  }
}

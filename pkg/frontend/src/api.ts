/** Thin typed client for the course service; one method per endpoint used. */

import type {
  ErrorBody,
  GradeReport,
  MessageView,
  Profile,
  ReceivedReview,
  ReviewSubmitted,
  RoundView,
  TaskView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function toError(response: Response): Promise<ApiError> {
  let code = "UnknownError";
  let detail = response.statusText;
  try {
    const body = (await response.json()) as ErrorBody;
    if (body && typeof body.error === "string") {
      code = body.error;
      detail = body.detail ?? detail;
    }
  } catch {
    // non-JSON body; keep the status text
  }
  return new ApiError(response.status, code, detail);
}

export class Client {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {
      Authorization: `Bearer ${this.token}`,
    };
    let payload: string | undefined;
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      payload = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, { method, headers, body: payload });
    if (!response.ok) {
      throw await toError(response);
    }
    return (await response.json()) as T;
  }

  round(roundId: string): Promise<RoundView> {
    return this.request("GET", `/rounds/${roundId}`);
  }

  profile(participantId: string): Promise<Profile> {
    return this.request("GET", `/participants/${participantId}`);
  }

  saveIntro(participantId: string, text: string): Promise<Profile> {
    return this.request("PUT", `/participants/${participantId}/intro`, { text });
  }

  submitWork(roundId: string, contentRef: string): Promise<unknown> {
    return this.request("POST", `/rounds/${roundId}/submissions`, {
      content_ref: contentRef,
    });
  }

  tasks(roundId: string, me: string): Promise<TaskView[]> {
    return this.request<{ tasks: TaskView[] }>(
      "GET",
      `/rounds/${roundId}/tasks?reviewer=${encodeURIComponent(me)}`,
    ).then((body) => body.tasks);
  }

  submitReview(
    taskId: string,
    prompts: [string, string, string, string],
    grade: number,
  ): Promise<ReviewSubmitted> {
    return this.request("POST", `/tasks/${taskId}/review`, { prompts, grade });
  }

  feedback(roundId: string, me: string): Promise<ReceivedReview[]> {
    return this.request<{ reviews: ReceivedReview[] }>(
      "GET",
      `/rounds/${roundId}/feedback?participant=${encodeURIComponent(me)}`,
    ).then((body) => body.reviews);
  }

  rate(reviewId: string, stars: number): Promise<unknown> {
    return this.request("POST", `/reviews/${reviewId}/rating`, { stars });
  }

  /** Rejects with ApiError code "GradesPending" until the gate clears. */
  grades(roundId: string, me: string): Promise<GradeReport> {
    return this.request(
      "GET",
      `/rounds/${roundId}/grades?participant=${encodeURIComponent(me)}`,
    );
  }

  thread(reviewId: string): Promise<MessageView[]> {
    return this.request<{ messages: MessageView[] }>(
      "GET",
      `/reviews/${reviewId}/messages`,
    ).then((body) => body.messages);
  }

  postMessage(reviewId: string, body: string): Promise<MessageView> {
    return this.request("POST", `/reviews/${reviewId}/messages`, { body });
  }
}

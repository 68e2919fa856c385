/** Pure view-model functions; everything the renderer shows is decided here. */

import type {
  Condition,
  GradeReport,
  Phase,
  ReceivedReview,
  TaskView,
} from "./types.js";

export const ANONYMOUS_REVIEWER = "Anonymous reviewer";
export const INTRO_MAX_CHARS = 500;
export const PROMPT_LABELS: readonly string[] = [
  "What is done well?",
  "What is unclear or unconvincing?",
  "What concrete change would most improve it?",
  "Overall impression",
];

export type GradePanelModel =
  | { kind: "hidden" }
  | { kind: "pending"; rated: number; total: number }
  | { kind: "ready"; perReview: number[]; aggregate: number | null };

/**
 * Decide what the grade panel shows. The report argument is whatever the
 * last grades request produced: a report, "pending" when the service said
 * GradesPending, or null when nothing has been fetched yet. Grades are never
 * computed client-side.
 */
export function gradePanel(
  phase: Phase,
  feedback: ReceivedReview[],
  report: GradeReport | "pending" | null,
): GradePanelModel {
  if (phase === "submission" || phase === "reviewing") {
    return { kind: "hidden" };
  }
  if (report !== null && report !== "pending") {
    return {
      kind: "ready",
      perReview: report.per_review_grades,
      aggregate: report.aggregate,
    };
  }
  return {
    kind: "pending",
    rated: feedback.filter((r) => r.rated).length,
    total: feedback.length,
  };
}

export function identified(condition: Condition): boolean {
  return condition !== "blind-random";
}

/** The intro form exists only where reviewers are identified. */
export function introFormVisible(condition: Condition): boolean {
  return identified(condition);
}

export function reviewerName(review: ReceivedReview): string {
  return review.reviewer?.display_name ?? ANONYMOUS_REVIEWER;
}

export function reviewerIntro(review: ReceivedReview): string | null {
  const intro = review.reviewer?.intro;
  return intro != null && intro !== "" ? intro : null;
}

export interface StarModel {
  value: number;
  filled: boolean;
}

/** Five stars, integers only; `current` marks how many are filled. */
export function starRow(current?: number): StarModel[] {
  const rated = current ?? 0;
  return [1, 2, 3, 4, 5].map((value) => ({ value, filled: value <= rated }));
}

export function validStars(stars: number): boolean {
  return Number.isInteger(stars) && stars >= 1 && stars <= 5;
}

export function gradeInRange(grade: number, lo = 0, hi = 100): boolean {
  return Number.isInteger(grade) && grade >= lo && grade <= hi;
}

export function introTooLong(text: string): boolean {
  return text.length > INTRO_MAX_CHARS;
}

/**
 * Prepare the four prompt fields for submission: trailing whitespace goes,
 * everything else (leading spaces, inner newlines) rides through unchanged.
 */
export function normalizePrompts(
  fields: [string, string, string, string],
): [string, string, string, string] {
  return fields.map((field) => field.replace(/\s+$/u, "")) as [
    string,
    string,
    string,
    string,
  ];
}

export function pendingTasks(tasks: TaskView[]): TaskView[] {
  return tasks.filter((task) => task.status === "pending");
}

export function phaseLabel(phase: Phase): string {
  switch (phase) {
    case "submission":
      return "Submission open";
    case "reviewing":
      return "Reviews in progress";
    case "rating":
      return "Rate your feedback";
    case "released":
      return "Grades released";
  }
}

/** HTML string builders; pure so the test suite can assert on output directly. */

import type {
  Condition,
  GradeReport,
  MessageView,
  Profile,
  ReceivedReview,
  RoundView,
  TaskView,
} from "./types.js";
import {
  GradePanelModel,
  PROMPT_LABELS,
  gradePanel,
  introFormVisible,
  pendingTasks,
  phaseLabel,
  reviewerIntro,
  reviewerName,
  starRow,
} from "./viewmodel.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderPhaseBanner(round: RoundView): string {
  return `<header class="phase-banner" data-phase="${round.phase}">
    <h1>Round ${escapeHtml(round.round_id)}</h1>
    <p>${phaseLabel(round.phase)}</p>
  </header>`;
}

/** Figure-of-merit: under blind review this section renders to nothing. */
export function renderIntroSection(condition: Condition, profile: Profile | null): string {
  if (!introFormVisible(condition)) {
    return "";
  }
  const current = profile?.intro ?? "";
  return `<section class="intro" id="intro-section">
    <h2>Your introduction</h2>
    <p>Shared with everyone who reads your reviews.</p>
    <form id="intro-form">
      <textarea name="intro" maxlength="500" rows="3">${escapeHtml(current)}</textarea>
      <span class="field-error" id="intro-error" hidden>Keep it under 500 characters.</span>
      <button type="submit">Save introduction</button>
    </form>
  </section>`;
}

export function renderSubmission(round: RoundView): string {
  if (round.phase !== "submission") {
    return "";
  }
  const note = round.submitted
    ? "<p>Draft received. Resubmitting replaces it.</p>"
    : "<p>No draft yet.</p>";
  return `<section class="submission" id="submission-section">
    <h2>Submit your work</h2>
    ${note}
    <form id="submission-form">
      <input name="content_ref" placeholder="link or file reference" required>
      <button type="submit">Submit</button>
    </form>
  </section>`;
}

function renderReviewForm(task: TaskView): string {
  const who = task.author
    ? `Review for ${escapeHtml(task.author.display_name)}`
    : "Review (author hidden)";
  const fields = PROMPT_LABELS.map(
    (label, i) => `<label>${escapeHtml(label)}
      <textarea name="prompt${i}" rows="3"></textarea>
    </label>`,
  ).join("\n");
  return `<article class="review-task" data-task="${task.task_id}">
    <h3>${who}</h3>
    <form class="review-form" data-task="${task.task_id}">
      ${fields}
      <label>Grade (0-100)
        <input name="grade" type="number" min="0" max="100" step="1" required>
      </label>
      <span class="field-error grade-error" hidden>Grade must be a whole number from 0 to 100.</span>
      <button type="submit">Send review</button>
      <p class="nudge" hidden></p>
    </form>
  </article>`;
}

export function renderTasks(tasks: TaskView[]): string {
  const open = pendingTasks(tasks);
  if (open.length === 0) {
    return `<section class="tasks" id="tasks-section"><h2>Reviews to write</h2>
    <p>Nothing waiting on you.</p></section>`;
  }
  return `<section class="tasks" id="tasks-section">
    <h2>Reviews to write (${open.length})</h2>
    ${open.map(renderReviewForm).join("\n")}
  </section>`;
}

function renderStars(review: ReceivedReview): string {
  if (review.rated) {
    const row = starRow(review.my_rating)
      .map((star) => (star.filled ? "★" : "☆"))
      .join("");
    return `<span class="stars rated" title="your rating">${row}</span>`;
  }
  const buttons = starRow()
    .map(
      (star) =>
        `<button class="star" data-review="${review.review_id}" data-stars="${star.value}"` +
        ` aria-label="rate ${star.value}">☆</button>`,
    )
    .join("");
  return `<span class="stars unrated">${buttons}</span>`;
}

function renderThread(reviewId: string, messages: MessageView[] | undefined): string {
  const items = (messages ?? [])
    .map((message) => {
      const who = message.sender
        ? escapeHtml(message.sender.display_name)
        : message.role;
      return `<li class="message message-${message.role}"><b>${who}:</b> ${escapeHtml(message.body)}</li>`;
    })
    .join("\n");
  return `<div class="thread" data-review="${reviewId}">
    <ul class="messages">${items}</ul>
    <form class="message-form" data-review="${reviewId}">
      <input name="body" maxlength="2000" placeholder="Reply to this review" required>
      <button type="submit">Send</button>
    </form>
  </div>`;
}

function renderFeedbackCard(
  review: ReceivedReview,
  thread: MessageView[] | undefined,
): string {
  const intro = reviewerIntro(review);
  const introHtml = intro
    ? `<p class="reviewer-intro">${escapeHtml(intro)}</p>`
    : "";
  const prompts = review.prompts
    .map(
      (text, i) =>
        `<dt>${escapeHtml(PROMPT_LABELS[i] ?? `Prompt ${i + 1}`)}</dt><dd>${escapeHtml(text)}</dd>`,
    )
    .join("\n");
  return `<article class="feedback" data-review="${review.review_id}">
    <h3>From ${escapeHtml(reviewerName(review))}</h3>
    ${introHtml}
    <dl class="prompts">${prompts}</dl>
    ${renderStars(review)}
    ${renderThread(review.review_id, thread)}
  </article>`;
}

export function renderFeedback(
  reviews: ReceivedReview[],
  threads: Map<string, MessageView[]>,
): string {
  if (reviews.length === 0) {
    return `<section class="feedback-list" id="feedback-section"><h2>Feedback received</h2>
    <p>No reviews yet.</p></section>`;
  }
  const cards = reviews
    .map((review) => renderFeedbackCard(review, threads.get(review.review_id)))
    .join("\n");
  return `<section class="feedback-list" id="feedback-section">
    <h2>Feedback received</h2>
    ${cards}
  </section>`;
}

export function renderGradePanel(model: GradePanelModel): string {
  if (model.kind === "hidden") {
    return "";
  }
  if (model.kind === "pending") {
    return `<section class="grades pending" id="grade-panel">
    <h2>Grades</h2>
    <p>Grades pending: rate all your feedback to unlock them (${model.rated} of ${model.total} rated).</p>
  </section>`;
  }
  const rows = model.perReview
    .map((grade) => `<li>${grade}</li>`)
    .join("");
  const aggregate =
    model.aggregate === null
      ? "<p>No reviews were received this round, so there is no aggregate grade.</p>"
      : `<p class="aggregate">Round grade: <b>${model.aggregate}</b></p>`;
  return `<section class="grades ready" id="grade-panel">
    <h2>Grades</h2>
    <ul class="per-review">${rows}</ul>
    ${aggregate}
  </section>`;
}

export interface PageState {
  round: RoundView;
  profile: Profile | null;
  tasks: TaskView[];
  feedback: ReceivedReview[];
  grades: GradeReport | "pending" | null;
  threads: Map<string, MessageView[]>;
}

export function renderPage(state: PageState): string {
  const showReviewing = state.round.phase !== "submission";
  const showRating = state.round.phase === "rating" || state.round.phase === "released";
  return [
    renderPhaseBanner(state.round),
    renderIntroSection(state.round.condition, state.profile),
    renderSubmission(state.round),
    showReviewing ? renderTasks(state.tasks) : "",
    showRating ? renderFeedback(state.feedback, state.threads) : "",
    renderGradePanel(gradePanel(state.round.phase, state.feedback, state.grades)),
  ]
    .filter((part) => part !== "")
    .join("\n");
}

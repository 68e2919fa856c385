/** DOM bootstrap: login panel, render loop, event delegation. */

import { ApiError, Client } from "./api.js";
import { App } from "./app.js";
import { POLL_INTERVAL_MS, Poller } from "./poll.js";
import { renderPage } from "./render.js";
import { gradeInRange, introTooLong, validStars } from "./viewmodel.js";

declare global {
  interface Window {
    /** Base URL of the course service; same origin when unset. */
    PEERCOURSE_API_BASE?: string;
  }
}

function mustFind<T extends Element>(selector: string): T {
  const element = document.querySelector<T>(selector);
  if (!element) {
    throw new Error(`missing element: ${selector}`);
  }
  return element;
}

function showError(text: string): void {
  const banner = mustFind<HTMLElement>("#error-banner");
  banner.textContent = text;
  banner.hidden = text === "";
}

function start(): void {
  const loginForm = mustFind<HTMLFormElement>("#login-form");
  const appRoot = mustFind<HTMLElement>("#app");
  let app: App | null = null;

  const repaint = () => {
    if (app && app.state.round) {
      appRoot.innerHTML = renderPage({
        round: app.state.round,
        profile: app.state.profile,
        tasks: app.state.tasks,
        feedback: app.state.feedback,
        grades: app.state.grades,
        threads: app.state.threads,
      });
    }
  };

  const tick = async () => {
    if (!app) {
      return;
    }
    try {
      await app.refresh();
      showError("");
    } catch (error) {
      showError(error instanceof ApiError ? error.message : "Connection lost, retrying");
    }
    repaint();
  };

  const poller = new Poller(tick, POLL_INTERVAL_MS);

  loginForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(loginForm);
    const base =
      (data.get("base") as string).trim() || window.PEERCOURSE_API_BASE || "";
    const client = new Client(base, (data.get("token") as string).trim());
    app = new App(
      client,
      (data.get("participant") as string).trim(),
      (data.get("round") as string).trim(),
    );
    mustFind<HTMLElement>("#login-panel").hidden = true;
    appRoot.hidden = false;
    void tick().then(() => poller.start());
  });

  appRoot.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    event.preventDefault();
    if (!app) {
      return;
    }
    if (form.id === "intro-form") {
      const text = (new FormData(form).get("intro") as string) ?? "";
      const warning = mustFind<HTMLElement>("#intro-error");
      if (introTooLong(text)) {
        warning.hidden = false;
        return;
      }
      warning.hidden = true;
      void app.saveIntro(text).then(repaint, (error) => showError(String(error)));
    } else if (form.id === "submission-form") {
      const ref = (new FormData(form).get("content_ref") as string) ?? "";
      void app.submitWork(ref).then(repaint, (error) => showError(String(error)));
    } else if (form.classList.contains("review-form")) {
      submitReview(form);
    } else if (form.classList.contains("message-form")) {
      const reviewId = form.dataset.review ?? "";
      const body = (new FormData(form).get("body") as string) ?? "";
      void app.postMessage(reviewId, body).then(repaint, (error) => {
        repaint();
        showError(String(error));
      });
      repaint(); // optimistic entry is already in the thread
    }
  });

  function submitReview(form: HTMLFormElement): void {
    if (!app) {
      return;
    }
    const data = new FormData(form);
    const fields: [string, string, string, string] = [
      (data.get("prompt0") as string) ?? "",
      (data.get("prompt1") as string) ?? "",
      (data.get("prompt2") as string) ?? "",
      (data.get("prompt3") as string) ?? "",
    ];
    const grade = Number(data.get("grade"));
    const gradeError = form.querySelector<HTMLElement>(".grade-error");
    if (!gradeInRange(grade)) {
      if (gradeError) {
        gradeError.hidden = false;
      }
      return;
    }
    const taskId = form.dataset.task ?? "";
    void app.submitReview(taskId, fields, grade).then(
      (nudge) => {
        if (nudge) {
          // keep the card on screen long enough to read the nudge
          const note = form.querySelector<HTMLElement>(".nudge");
          if (note) {
            note.textContent = nudge;
            note.hidden = false;
            setTimeout(repaint, 4000);
            return;
          }
        }
        repaint();
      },
      (error) => showError(String(error)),
    );
  }

  appRoot.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (!app) {
      return;
    }
    if (target.classList.contains("star")) {
      const stars = Number(target.dataset.stars);
      const reviewId = target.dataset.review ?? "";
      if (!validStars(stars)) {
        return;
      }
      void app.rate(reviewId, stars).then(repaint, (error) => showError(String(error)));
    }
  });
}

document.addEventListener("DOMContentLoaded", start);

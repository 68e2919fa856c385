/** Grade-gate conformance: the panel stays pending until every review is rated. */

import { afterEach, describe, expect, it, vi } from "vitest";

import { App } from "../src/app.js";
import { POLL_INTERVAL_MS, Poller } from "../src/poll.js";
import { renderGradePanel } from "../src/render.js";
import { gradePanel } from "../src/viewmodel.js";
import { FakeService } from "./fakes.js";

async function flushMicrotasks(): Promise<void> {
  for (let i = 0; i < 25; i++) {
    await Promise.resolve();
  }
}

describe("grade gating in the client", () => {
  afterEach(() => {
    vi.useRealTimers();
  });

  it("shows pending with 3 reviews received and 2 rated", async () => {
    const service = new FakeService({ reviewCount: 3 });
    const app = new App(service, "p1", "r1");
    await app.refresh();

    await app.rate("v1", 4);
    await app.rate("v2", 5);

    expect(app.state.grades).toBe("pending");
    const model = gradePanel("rating", app.state.feedback, app.state.grades);
    expect(model).toEqual({ kind: "pending", rated: 2, total: 3 });

    const html = renderGradePanel(model);
    expect(html).toContain("Grades pending");
    expect(html).toContain("(2 of 3 rated)");
    expect(html).not.toContain("Round grade");
  });

  it("renders grades within one polling interval of the third rating", async () => {
    const service = new FakeService({ reviewCount: 3 });
    const app = new App(service, "p1", "r1");
    await app.refresh();
    await app.rate("v1", 4);
    await app.rate("v2", 5);
    expect(app.state.grades).toBe("pending");

    vi.useFakeTimers();
    const poller = new Poller(() => app.refresh());
    poller.start();

    // The third rating lands out of band (say, from another browser tab).
    const last = service.reviews[2];
    if (!last) throw new Error("fixture should hold three reviews");
    last.rated = true;
    last.my_rating = 3;

    // Nothing moves until the poll fires.
    expect(app.state.grades).toBe("pending");

    await vi.advanceTimersByTimeAsync(POLL_INTERVAL_MS);
    await flushMicrotasks();
    poller.stop();

    expect(app.state.grades).not.toBe("pending");
    expect(app.state.grades).not.toBeNull();
    const report = app.state.grades;
    if (report === "pending" || report === null) throw new Error("unreachable");
    expect(report.per_review_grades).toEqual([70, 75, 80]);
    expect(report.aggregate).toBe(75);

    const html = renderGradePanel(
      gradePanel("rating", app.state.feedback, app.state.grades),
    );
    expect(html).toContain("Round grade: <b>75</b>");
    expect(html).not.toContain("Grades pending");
  });

  it("unlocks immediately when the last rating is sent from this client", async () => {
    const service = new FakeService({ reviewCount: 3 });
    const app = new App(service, "p1", "r1");
    await app.refresh();

    await app.rate("v1", 2);
    await app.rate("v2", 2);
    expect(app.state.grades).toBe("pending");

    await app.rate("v3", 5);
    const report = app.state.grades;
    if (report === "pending" || report === null) {
      throw new Error("grades should be unlocked after the final rating");
    }
    expect(report.aggregate).toBe(75);
    expect(app.state.feedback.every((review) => review.grade !== undefined)).toBe(
      true,
    );
  });

  it("keeps per-review grades out of feedback payloads while the gate is shut", async () => {
    const service = new FakeService({ reviewCount: 2 });
    const app = new App(service, "p1", "r1");
    await app.refresh();
    await app.rate("v1", 4);

    expect(app.state.feedback.some((review) => "grade" in review)).toBe(false);
  });

  it("hides the panel entirely before the rating phase", () => {
    expect(gradePanel("submission", [], null)).toEqual({ kind: "hidden" });
    expect(gradePanel("reviewing", [], null)).toEqual({ kind: "hidden" });
    expect(renderGradePanel({ kind: "hidden" })).toBe("");
  });

  it("reports a null aggregate plainly when no reviews arrived", () => {
    const html = renderGradePanel({ kind: "ready", perReview: [], aggregate: null });
    expect(html).toContain("No reviews were received this round");
    expect(html).not.toContain("Round grade");
  });

  it("polls at five-second cadence and stops cleanly", async () => {
    vi.useFakeTimers();
    let ticks = 0;
    const poller = new Poller(() => {
      ticks += 1;
    });
    expect(POLL_INTERVAL_MS).toBe(5000);
    poller.start();
    expect(poller.running).toBe(true);

    await vi.advanceTimersByTimeAsync(4999);
    expect(ticks).toBe(0);
    await vi.advanceTimersByTimeAsync(1);
    expect(ticks).toBe(1);
    await vi.advanceTimersByTimeAsync(10_000);
    expect(ticks).toBe(3);

    poller.stop();
    expect(poller.running).toBe(false);
    await vi.advanceTimersByTimeAsync(20_000);
    expect(ticks).toBe(3);
  });
});

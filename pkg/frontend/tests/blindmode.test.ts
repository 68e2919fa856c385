/** Blind-mode rendering: no intro form, no names, reviewers stay anonymous. */

import { describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import {
  renderFeedback,
  renderIntroSection,
  renderPage,
} from "../src/render.js";
import type { MessageView, Profile } from "../src/types.js";
import {
  ANONYMOUS_REVIEWER,
  introFormVisible,
  reviewerIntro,
  reviewerName,
} from "../src/viewmodel.js";
import { FakeService, makeReview } from "./fakes.js";

const ME: Profile = {
  participant_id: "p1",
  display_name: "Me Myself",
  intro: "I like graphs.",
};

describe("blind mode", () => {
  it("renders no intro section under blind-random", () => {
    expect(introFormVisible("blind-random")).toBe(false);
    expect(renderIntroSection("blind-random", ME)).toBe("");
    expect(renderIntroSection("blind-random", null)).toBe("");
  });

  it("keeps the intro form for both identified conditions", () => {
    for (const condition of ["identified-random", "identified-incentive"] as const) {
      const html = renderIntroSection(condition, ME);
      expect(html).toContain("intro-form");
      expect(html).toContain("I like graphs.");
    }
  });

  it("labels reviewers anonymously when the service omits identity", () => {
    const review = makeReview("v1", false);
    expect(review.reviewer).toBeUndefined();
    expect(reviewerName(review)).toBe(ANONYMOUS_REVIEWER);
    expect(reviewerIntro(review)).toBeNull();

    const html = renderFeedback([review], new Map());
    expect(html).toContain("From Anonymous reviewer");
    expect(html).not.toContain("reviewer-intro");
  });

  it("shows reviewer name and intro when the service provides them", () => {
    const review = makeReview("v1", true);
    const html = renderFeedback([review], new Map());
    expect(html).toContain("From Reviewer V1");
    expect(html).toContain("reviewer-intro");
    expect(html).toContain("Hi, I am reviewer v1.");
    expect(html).not.toContain(ANONYMOUS_REVIEWER);
  });

  it("falls back to role labels for messages without a sender", () => {
    const messages: MessageView[] = [
      { role: "reviewer", body: "Did the fix land?", sent_at: "t1" },
      { role: "author", body: "Yes, pushed.", sent_at: "t2" },
    ];
    const review = makeReview("v1", false);
    const html = renderFeedback([review], new Map([["v1", messages]]));
    expect(html).toContain("<b>reviewer:</b> Did the fix land?");
    expect(html).toContain("<b>author:</b> Yes, pushed.");
  });

  it("renders a whole blind page with zero identity leakage", async () => {
    const service = new FakeService({ condition: "blind-random", reviewCount: 3 });
    const app = new App(service, "p1", "r1");
    await app.refresh();
    await app.openThread("v1");
    await app.postMessage("v1", "thanks for the pointer");

    const html = renderPage({
      round: app.state.round!,
      profile: app.state.profile,
      tasks: app.state.tasks,
      feedback: app.state.feedback,
      grades: app.state.grades,
      threads: app.state.threads,
    });

    expect(html).not.toContain("intro-section");
    expect(html).not.toContain("Reviewer V");
    expect(html).not.toContain("reviewer-intro");
    const anonymousCount = html.split("From Anonymous reviewer").length - 1;
    expect(anonymousCount).toBe(3);
  });

  it("escapes hostile review text instead of injecting markup", () => {
    const review = makeReview("v1", false);
    review.prompts = [
      '<script>alert("x")</script>',
      "a & b",
      '"quoted"',
      "fine",
    ];
    const html = renderFeedback([review], new Map());
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
    expect(html).toContain("a &amp; b");
  });
});

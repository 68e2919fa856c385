/** Controller behavior: optimistic messaging, review submission, phase scoping. */

import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { App } from "../src/app.js";
import type { MessageView } from "../src/types.js";
import { FakeService } from "./fakes.js";

describe("optimistic message posting", () => {
  it("shows the draft immediately, then swaps in the stored message", async () => {
    const service = new FakeService();
    const app = new App(service, "p1", "r1");
    await app.openThread("v1");

    let resolveSend: ((message: MessageView) => void) | null = null;
    service.postMessage = () =>
      new Promise<MessageView>((resolve) => {
        resolveSend = resolve;
      });

    const inflight = app.postMessage("v1", "does section 2 read better now?");
    const during = app.state.threads.get("v1") ?? [];
    expect(during).toHaveLength(1);
    expect(during[0]?.body).toBe("does section 2 read better now?");
    expect(during[0]?.sent_at).toBe("sending");

    const stored: MessageView = {
      role: "author",
      body: "does section 2 read better now?",
      sent_at: "2026-03-01T10:06:00+00:00",
    };
    expect(resolveSend).not.toBeNull();
    resolveSend!(stored);
    await inflight;

    const after = app.state.threads.get("v1") ?? [];
    expect(after).toHaveLength(1);
    expect(after[0]).toBe(stored);
    expect(after.some((message) => message.sent_at === "sending")).toBe(false);
  });

  it("removes the draft and rethrows when the service refuses it", async () => {
    const service = new FakeService();
    const app = new App(service, "p1", "r1");
    await app.openThread("v1");
    await app.postMessage("v1", "first message sticks");

    service.failNextMessage = true;
    await expect(app.postMessage("v1", "this one bounces")).rejects.toThrow(
      ApiError,
    );

    const thread = app.state.threads.get("v1") ?? [];
    expect(thread).toHaveLength(1);
    expect(thread[0]?.body).toBe("first message sticks");
  });
});

describe("review submission", () => {
  it("normalizes prompt fields before they leave the client", async () => {
    const service = new FakeService({ phase: "reviewing" });
    service.taskList = [{ task_id: "t1", round_id: "r1", status: "pending" }];
    const app = new App(service, "p1", "r1");
    await app.refresh();

    const nudge = await app.submitReview(
      "t1",
      ["  leading stays", "trailing goes  ", "lines\ngo\n\n", "plain"],
      82,
    );
    expect(nudge).toBeNull();
    expect(service.sentPrompts).toEqual([
      ["  leading stays", "trailing goes", "lines\ngo", "plain"],
    ]);
    expect(app.state.tasks).toEqual([]);
  });

  it("relays the service's elaboration nudge to the caller", async () => {
    const service = new FakeService({ phase: "reviewing" });
    service.taskList = [{ task_id: "t1", round_id: "r1", status: "pending" }];
    service.nudge = "Could you make the second point more actionable?";
    const app = new App(service, "p1", "r1");
    await app.refresh();

    const nudge = await app.submitReview("t1", ["a", "b", "c", "d"], 70);
    expect(nudge).toBe("Could you make the second point more actionable?");
  });
});

describe("phase-scoped fetching", () => {
  it("fetches neither tasks nor feedback during submission", async () => {
    const service = new FakeService({ phase: "submission" });
    service.taskList = [{ task_id: "t1", round_id: "r1", status: "pending" }];
    const app = new App(service, "p1", "r1");
    await app.refresh();

    expect(app.state.tasks).toEqual([]);
    expect(app.state.feedback).toEqual([]);
    expect(app.state.grades).toBeNull();
  });

  it("fetches tasks but not feedback while reviewing", async () => {
    const service = new FakeService({ phase: "reviewing" });
    service.taskList = [{ task_id: "t1", round_id: "r1", status: "pending" }];
    const app = new App(service, "p1", "r1");
    await app.refresh();

    expect(app.state.tasks).toHaveLength(1);
    expect(app.state.feedback).toEqual([]);
    expect(app.state.grades).toBeNull();
  });

  it("keeps open threads fresh across refreshes and drops closed ones", async () => {
    const service = new FakeService();
    const app = new App(service, "p1", "r1");
    await app.refresh();

    await app.openThread("v1");
    await app.postMessage("v1", "hello there");
    await app.refresh();
    expect(app.state.threads.get("v1")).toHaveLength(1);

    app.closeThread("v1");
    await app.refresh();
    expect(app.state.threads.has("v1")).toBe(false);
  });
});

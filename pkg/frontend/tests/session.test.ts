import { describe, expect, it, vi } from "vitest";

import { renderForm } from "../src/form_model";
import { RequiredFieldsEmpty, Session } from "../src/session";
import type { CallResponse } from "../src/types";

const form = renderForm("SendSms", null, ["PhoneNumbers", "SignName"]);

function clientReturning(outcomes: string[]) {
  let i = 0;
  return {
    call: vi.fn(async (): Promise<CallResponse> => {
      const outcome = outcomes[i++] ?? "Right";
      return { api: "SendSms", outcome, right: outcome === "Right" };
    }),
  };
}

describe("Session", () => {
  it("shows sr 75% after three successes in four calls", async () => {
    const client = clientReturning([
      "Right", "Right", "Right", "isv.SMS_SIGNATURE_ILLEGAL",
    ]);
    const session = new Session(client);
    for (let i = 0; i < 4; i++) {
      await session.execute(form, { PhoneNumbers: "13812345678" }, null);
    }
    expect(session.sr()).toEqual({
      callNumber: 4,
      callSuccess: 3,
      sr: 0.75,
      percent: "75%",
    });
  });

  it("starts at zero calls without dividing by zero", () => {
    const session = new Session(clientReturning([]));
    expect(session.sr()).toEqual({
      callNumber: 0,
      callSuccess: 0,
      sr: 0,
      percent: "0%",
    });
  });

  it("records predicted vs actual with a match badge", async () => {
    const client = clientReturning(["Right", "isv.SMS_SIGNATURE_ILLEGAL"]);
    const session = new Session(client);
    const hit = await session.execute(form, {}, "Right");
    const miss = await session.execute(form, {}, "Right");
    expect(hit.match).toBe(true);
    expect(miss.match).toBe(false);
    expect(miss.actual).toBe("isv.SMS_SIGNATURE_ILLEGAL");
  });

  it("leaves the badge unset when no prediction was available", async () => {
    const session = new Session(clientReturning(["Right"]));
    const entry = await session.execute(form, {}, null);
    expect(entry.match).toBeNull();
  });

  it("blocks execution while required fields are empty, unless overridden", async () => {
    const minedForm = {
      api: "SendSms",
      degraded: false,
      fields: [
        {
          name: "SignName",
          widget: { kind: "text" as const },
          required: true,
          placeholder: "",
          producerHint: null,
        },
      ],
    };
    const client = clientReturning(["isv.SMS_SIGNATURE_ILLEGAL"]);
    const session = new Session(client);

    await expect(session.execute(minedForm, {}, null)).rejects.toThrow(
      RequiredFieldsEmpty,
    );
    expect(client.call).not.toHaveBeenCalled();

    const entry = await session.execute(minedForm, {}, "Right", true);
    expect(entry.actual).toBe("isv.SMS_SIGNATURE_ILLEGAL");
    expect(entry.match).toBe(false);
    expect(session.history).toHaveLength(1);
  });

  it("sends exactly the visible form state (empty inputs dropped)", async () => {
    const client = clientReturning(["Right"]);
    const session = new Session(client, "console");
    await session.execute(
      form,
      { PhoneNumbers: "13812345678", SignName: "" },
      null,
    );
    expect(client.call).toHaveBeenCalledWith(
      "SendSms",
      { PhoneNumbers: "13812345678" },
      "console",
    );
  });
});

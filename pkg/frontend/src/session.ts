// Execute calls and compare predicted vs actual. The history drives the
// success-rate widget: sr = successful calls / total calls, same arithmetic
// the service reports under /v1/metrics/sr.

import { formToParams, missingRequired, type FormModel } from "./form_model";
import type { CallResponse } from "./types";

/** The one service call a session needs (ApiClient satisfies it). */
export interface Caller {
  call(
    api: string,
    params: Record<string, string>,
    session?: string,
  ): Promise<CallResponse>;
}

export class RequiredFieldsEmpty extends Error {
  constructor(public missing: string[]) {
    super(`required fields empty: ${missing.join(", ")}`);
  }
}

export interface HistoryEntry {
  api: string;
  params: Record<string, string>;
  predicted: string | null;
  actual: string;
  right: boolean;
  /** true/false when a prediction was made, null when there was none */
  match: boolean | null;
}

export interface SrView {
  callNumber: number;
  callSuccess: number;
  sr: number;
  percent: string;
}

export class Session {
  history: HistoryEntry[] = [];

  constructor(private client: Caller, private sessionId?: string) {}

  /**
   * Validate, send, record. `override` skips the required-field gate so a
   * failure can be provoked deliberately.
   */
  async execute(
    form: FormModel,
    values: Record<string, string>,
    predicted: string | null,
    override = false,
  ): Promise<HistoryEntry> {
    const missing = missingRequired(form, values);
    if (missing.length > 0 && !override) {
      throw new RequiredFieldsEmpty(missing);
    }
    const params = formToParams(values);
    const res = await this.client.call(form.api, params, this.sessionId);
    const entry: HistoryEntry = {
      api: form.api,
      params,
      predicted,
      actual: res.outcome,
      right: res.right,
      match: predicted === null ? null : predicted === res.outcome,
    };
    this.history.push(entry);
    return entry;
  }

  sr(): SrView {
    const callNumber = this.history.length;
    const callSuccess = this.history.filter((e) => e.right).length;
    const sr = callNumber === 0 ? 0 : callSuccess / callNumber;
    return { callNumber, callSuccess, sr, percent: `${Math.round(sr * 100)}%` };
  }
}

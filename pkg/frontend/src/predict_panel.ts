// Live prediction: every form edit schedules a debounced POST /v1/predict
// and the panel shows the top label, its probability, and any constraint
// violations. At most one response is applied per edit burst (latest wins);
// a network failure flips the panel to its offline state.

import { debounce, type Debounced } from "./debounce";
import type { PredictResponse, Violation } from "./types";

/** The one service call this panel needs (ApiClient satisfies it). */
export interface Predictor {
  predict(api: string, params: Record<string, string>): Promise<PredictResponse>;
}

export interface PanelState {
  status: "idle" | "pending" | "ready" | "offline";
  label: string | null;
  probability: number | null;
  violations: Violation[];
  knowledgeAvailable: boolean | null;
}

const IDLE: PanelState = {
  status: "idle",
  label: null,
  probability: null,
  violations: [],
  knowledgeAvailable: null,
};

export class PredictPanel {
  state: PanelState = IDLE;
  private seq = 0;
  private scheduled: Debounced<[string, Record<string, string>]>;

  constructor(
    private client: Predictor,
    private onChange: (state: PanelState) => void = () => {},
    waitMs = 300,
  ) {
    this.scheduled = debounce((api, params) => {
      void this.request(api, params);
    }, waitMs);
  }

  /** Call on every form edit. Empty api suppresses prediction entirely. */
  edit(api: string | null, params: Record<string, string>): void {
    if (!api) {
      this.scheduled.cancel();
      this.seq += 1; // orphan any in-flight response
      this.set(IDLE);
      return;
    }
    this.set({ ...this.state, status: "pending" });
    this.scheduled(api, params);
  }

  private async request(api: string, params: Record<string, string>): Promise<void> {
    const ticket = ++this.seq;
    try {
      const res = await this.client.predict(api, params);
      if (ticket !== this.seq) return; // a newer edit superseded this one
      this.set({
        status: "ready",
        label: res.prediction?.label ?? null,
        probability: res.prediction?.probability ?? null,
        violations: res.violations,
        knowledgeAvailable: res.knowledge_available,
      });
    } catch {
      if (ticket !== this.seq) return;
      this.set({ ...IDLE, status: "offline" });
    }
  }

  private set(state: PanelState): void {
    this.state = state;
    this.onChange(state);
  }
}

// DOM shell: wires the form model, the live prediction panel, and the call
// session together. All logic lives in the imported modules; this file only
// moves values between them and the page.

import { ApiClient } from "./api";
import { renderForm, type FormModel } from "./form_model";
import { PredictPanel, type PanelState } from "./predict_panel";
import { RequiredFieldsEmpty, Session } from "./session";

const client = new ApiClient("");
const session = new Session(client, "console");

const apiSelect = el<HTMLSelectElement>("#api");
const formBox = el<HTMLElement>("#form");
const panelBox = el<HTMLElement>("#panel");
const historyBox = el<HTMLElement>("#history");
const srBox = el<HTMLElement>("#sr");
const offlineBanner = el<HTMLElement>("#offline");
const sendButton = el<HTMLButtonElement>("#send");
const overrideCheck = el<HTMLInputElement>("#override");

let form: FormModel = { api: "", degraded: true, fields: [] };
let lastPrediction: string | null = null;

const panel = new PredictPanel(client, (state) => {
  lastPrediction = state.label;
  paintPanel(state);
});

function el<T extends Element>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

function values(): Record<string, string> {
  const out: Record<string, string> = {};
  formBox.querySelectorAll<HTMLInputElement | HTMLSelectElement>("[name]").forEach(
    (input) => {
      out[input.name] = input.value;
    },
  );
  return out;
}

function paintForm(): void {
  formBox.innerHTML = "";
  for (const field of form.fields) {
    const row = document.createElement("label");
    row.className = "field";
    const title = document.createElement("span");
    title.textContent = field.required ? `${field.name} *` : field.name;
    row.appendChild(title);

    let input: HTMLInputElement | HTMLSelectElement;
    if (field.widget.kind === "select") {
      input = document.createElement("select");
      input.appendChild(new Option("", ""));
      for (const option of field.widget.options) {
        input.appendChild(new Option(option, option));
      }
    } else {
      input = document.createElement("input");
      if (field.widget.kind === "number") {
        input.type = "number";
        input.min = String(field.widget.min);
        input.max = String(field.widget.max);
      }
      input.placeholder = field.placeholder;
    }
    input.name = field.name;
    input.addEventListener("input", () => panel.edit(form.api, values()));
    row.appendChild(input);

    if (field.producerHint) {
      const hint = document.createElement("a");
      hint.href = field.producerHint.link;
      hint.textContent = `produce via ${field.producerHint.producer}`;
      hint.addEventListener("click", () => {
        apiSelect.value = field.producerHint!.producer;
        void selectApi(field.producerHint!.producer);
      });
      row.appendChild(hint);
    }
    formBox.appendChild(row);
  }
  if (form.degraded) {
    const note = document.createElement("p");
    note.textContent = "no mined knowledge yet: free-text form";
    formBox.appendChild(note);
  }
}

function paintPanel(state: PanelState): void {
  offlineBanner.hidden = state.status !== "offline";
  if (state.status === "idle") {
    panelBox.textContent = "pick an API to see predictions";
    return;
  }
  if (state.status === "offline") {
    panelBox.textContent = "";
    return;
  }
  const bits: string[] = [];
  if (state.label !== null && state.probability !== null) {
    bits.push(`${state.label} (p=${state.probability.toFixed(2)})`);
  }
  for (const v of state.violations) {
    bits.push(`⚠ ${v.param}: ${v.detail}`);
  }
  if (state.knowledgeAvailable === false) {
    bits.push("(no mined knowledge for this API)");
  }
  panelBox.textContent =
    bits.join("\n") + (state.status === "pending" ? " …" : "");
}

function paintSession(): void {
  const view = session.sr();
  srBox.textContent = `sr ${view.percent} (${view.callSuccess}/${view.callNumber})`;
  historyBox.innerHTML = "";
  for (const entry of [...session.history].reverse()) {
    const row = document.createElement("li");
    const badge =
      entry.match === null ? "" : entry.match ? " [match]" : " [mismatch]";
    row.textContent = `${entry.api} → ${entry.actual}${badge}`;
    historyBox.appendChild(row);
  }
}

async function selectApi(api: string): Promise<void> {
  const doc = await client.knowledge(api);
  form = renderForm(api, doc);
  paintForm();
  panel.edit(api, values());
}

async function main(): Promise<void> {
  const apis = await client.listApis();
  for (const api of apis) apiSelect.appendChild(new Option(api, api));
  apiSelect.addEventListener("change", () => void selectApi(apiSelect.value));

  sendButton.addEventListener("click", async () => {
    try {
      await session.execute(form, values(), lastPrediction, overrideCheck.checked);
    } catch (err) {
      if (err instanceof RequiredFieldsEmpty) {
        alert(`fill required fields: ${err.missing.join(", ")}`);
        return;
      }
      throw err;
    }
    paintSession();
  });

  if (apis.length > 0) {
    apiSelect.value = apis[0]!;
    await selectApi(apis[0]!);
  }
  paintSession();
}

void main();

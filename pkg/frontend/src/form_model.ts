// Build a parameter form from a knowledge document. Mined constraints decide
// the widget: an enumeration renders as a select over exactly the mined
// values, a numeric range as a bounded number input, everything else as
// free text. Absent knowledge degrades to an all-text form so the console
// stays usable on day one.

import type { KnowledgeDoc, ParamDoc } from "./types";

export type Widget =
  | { kind: "select"; options: string[] }
  | { kind: "number"; min: number; max: number }
  | { kind: "text" };

export interface FieldModel {
  name: string;
  widget: Widget;
  required: boolean;
  placeholder: string;
  /** "produce this value via <producer>" hint, when a producer API is known */
  producerHint: { producer: string; link: string } | null;
}

export interface FormModel {
  api: string;
  degraded: boolean;
  fields: FieldModel[];
}

function widgetFor(doc: ParamDoc): Widget {
  if (doc.enum_values !== null) {
    return { kind: "select", options: doc.enum_values };
  }
  if (doc.numeric_range !== null) {
    return { kind: "number", min: doc.numeric_range.min, max: doc.numeric_range.max };
  }
  return { kind: "text" };
}

function placeholderFor(doc: ParamDoc): string {
  const top = doc.profile.patterns[0];
  const example = doc.examples[0];
  if (top === undefined) return "";
  const pattern = top[0];
  return example !== undefined ? `${pattern} e.g. ${example}` : pattern;
}

export function producerLink(producer: string): string {
  return `#/apis/${encodeURIComponent(producer)}`;
}

/** Deterministic field order: declared inputs first, then mined extras. */
function fieldOrder(doc: KnowledgeDoc): string[] {
  const declared = doc.spec?.inputs ?? [];
  const mined = Object.keys(doc.params).sort();
  const seen = new Set(declared);
  return [...declared, ...mined.filter((name) => !seen.has(name))];
}

export function renderForm(
  api: string,
  doc: KnowledgeDoc | null,
  fallbackParams: string[] = [],
): FormModel {
  if (doc === null) {
    return {
      api,
      degraded: true,
      fields: fallbackParams.map((name) => ({
        name,
        widget: { kind: "text" },
        required: false,
        placeholder: "",
        producerHint: null,
      })),
    };
  }

  const fields: FieldModel[] = [];
  for (const name of fieldOrder(doc)) {
    const param = doc.params[name];
    const edge = doc.dependencies[name]?.[0];
    fields.push({
      name,
      widget: param ? widgetFor(param) : { kind: "text" },
      required: param?.required ?? false,
      placeholder: param ? placeholderFor(param) : "",
      producerHint: edge
        ? { producer: edge.producer, link: producerLink(edge.producer) }
        : null,
    });
  }
  return { api, degraded: false, fields };
}

/**
 * The request body is exactly the visible form state: non-empty values pass
 * through untouched, empty inputs mean "parameter absent".
 */
export function formToParams(
  values: Record<string, string>,
): Record<string, string> {
  const params: Record<string, string> = {};
  for (const [name, value] of Object.entries(values)) {
    if (value !== "") params[name] = value;
  }
  return params;
}

/** Names of required fields that are empty; nonempty blocks submission. */
export function missingRequired(
  form: FormModel,
  values: Record<string, string>,
): string[] {
  return form.fields
    .filter((f) => f.required && (values[f.name] ?? "") === "")
    .map((f) => f.name);
}

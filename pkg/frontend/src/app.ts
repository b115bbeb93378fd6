// Annotator single-page app: fetches tasks, renders side-by-side diffs,
// captures labels, and submits judgments back to the service.

import { fetchNextTask, fetchProgress, submitRecord } from "./api.js";
import {
  AnnotationItem,
  CATEGORIES,
  Category,
  ReferencePayload,
  VERDICTS,
  Verdict,
} from "./contract.js";
import { computeDiff } from "./diff.js";
import {
  FormState,
  emptyForm,
  toRecord,
  toggleCategory,
  toggleExpected,
  selectVerdict,
  validationError,
} from "./validation.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderDiffPanel(
  title: string,
  original: string,
  variant: string
): HTMLElement {
  const panel = el("section", "diff-panel");
  panel.appendChild(el("h3", undefined, title));
  const line = el("p", "diff-line");
  for (const run of computeDiff(original, variant)) {
    const span = el("span", `run ${run.kind}`, run.tokens.join(" "));
    line.appendChild(span);
    line.appendChild(document.createTextNode(" "));
  }
  panel.appendChild(line);
  return panel;
}

export class AnnotatorApp {
  root: HTMLElement;
  annotator: string;
  base: string;
  item: AnnotationItem | null = null;
  form: FormState = emptyForm;
  message = "";

  constructor(root: HTMLElement, annotator: string, base = "") {
    this.root = root;
    this.annotator = annotator;
    this.base = base;
  }

  async start(): Promise<void> {
    this.item = await fetchNextTask(this.annotator, undefined, this.base);
    this.form = emptyForm;
    this.message = "";
    await this.renderWithProgress();
  }

  async renderWithProgress(): Promise<void> {
    const progress = await fetchProgress(this.annotator, this.base);
    this.render(`${progress.done} / ${progress.total}`);
  }

  render(progressText = ""): void {
    this.root.textContent = "";
    const header = el("header");
    header.appendChild(el("h1", undefined, "Translation change annotation"));
    header.appendChild(el("span", "progress", progressText));
    this.root.appendChild(header);

    if (this.item === null) {
      this.root.appendChild(
        el("p", "done", "All tasks are annotated. Thank you!")
      );
      return;
    }
    const item = this.item;
    const payload = item.payload;

    this.root.appendChild(el("p", "phase", `Phase: ${item.phase}`));
    this.root.appendChild(
      renderDiffPanel("Source", payload.source_original, payload.source_variant)
    );
    this.root.appendChild(
      renderDiffPanel(
        "Translations",
        payload.translation_original,
        payload.translation_variant
      )
    );
    if (item.phase === "WithReference") {
      const refs = payload as ReferencePayload;
      this.root.appendChild(
        renderDiffPanel("References", refs.reference_original, refs.reference_variant)
      );
    }
    this.root.appendChild(this.renderForm(item));
  }

  renderForm(item: AnnotationItem): HTMLElement {
    const form = el("form", "judgment");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });

    const expectedLabel = el("label", "expected");
    const expectedBox = el("input") as HTMLInputElement;
    expectedBox.type = "checkbox";
    expectedBox.id = "expected";
    expectedBox.checked = this.form.expected;
    expectedBox.addEventListener("change", () => {
      this.form = toggleExpected(this.form, expectedBox.checked);
      this.render();
    });
    expectedLabel.appendChild(expectedBox);
    expectedLabel.appendChild(
      document.createTextNode(
        " The change is an expected consequence of the modification"
      )
    );
    form.appendChild(expectedLabel);

    const categoryBlock = el("fieldset", "categories");
    categoryBlock.appendChild(el("legend", undefined, "Unexpected change categories"));
    for (const category of CATEGORIES) {
      const label = el("label");
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.name = "category";
      box.value = category;
      box.checked = this.form.categories.includes(category);
      box.disabled = this.form.expected;
      box.addEventListener("change", () => {
        this.form = toggleCategory(this.form, category as Category);
        this.render();
      });
      label.appendChild(box);
      label.appendChild(document.createTextNode(` ${category}`));
      categoryBlock.appendChild(label);
    }
    form.appendChild(categoryBlock);

    if (item.phase === "WithReference") {
      const verdictBlock = el("fieldset", "verdict");
      verdictBlock.appendChild(el("legend", undefined, "Which translation is better?"));
      for (const verdict of VERDICTS) {
        const label = el("label");
        const radio = el("input") as HTMLInputElement;
        radio.type = "radio";
        radio.name = "verdict";
        radio.value = verdict;
        radio.checked = this.form.verdict === verdict;
        radio.addEventListener("change", () => {
          this.form = selectVerdict(this.form, verdict as Verdict);
          this.render();
        });
        label.appendChild(radio);
        label.appendChild(document.createTextNode(` ${verdict}`));
        verdictBlock.appendChild(label);
      }
      form.appendChild(verdictBlock);
    }

    const submit = el("button", "submit", "Submit judgment");
    submit.setAttribute("type", "submit");
    form.appendChild(submit);
    form.appendChild(el("p", "message", this.message));
    return form;
  }

  async submit(): Promise<void> {
    if (this.item === null) {
      return;
    }
    const blocked = validationError(this.item, this.form);
    if (blocked !== null) {
      this.message = blocked;
      this.render();
      return;
    }
    await submitRecord(toRecord(this.item, this.annotator, this.form), this.base);
    await this.start();
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const stored = window.localStorage.getItem("annotator_id");
  const annotator =
    stored ?? window.prompt("Annotator id:")?.trim() ?? "anonymous";
  window.localStorage.setItem("annotator_id", annotator);
  const app = new AnnotatorApp(root, annotator);
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}

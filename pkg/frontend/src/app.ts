import { ApiError, HuecapClient } from "./api";
import { Board } from "./board";
import { Preview } from "./preview";
import { BoardState } from "./state";
import { describeProfile, type SessionDoc } from "./types";

export interface AppElements {
  board: HTMLElement;
  banner: HTMLElement;
  status: HTMLElement;
  score: HTMLElement;
  submit: HTMLButtonElement;
  originalImg: HTMLImageElement;
  correctedImg: HTMLImageElement;
  fileInput: HTMLInputElement;
  sampleButtons: HTMLElement;
}

const SAMPLE_IMAGES = ["samples/hue-bands.png", "samples/garden.png"];

/**
 * Wires the board, score panel, and preview pane to the service.  The page
 * never computes a score or a color itself: every displayed number and every
 * corrected pixel is taken from a service response.
 */
export class App {
  private session: SessionDoc | null = null;
  private state: BoardState | null = null;
  private board: Board | null = null;
  private readonly preview: Preview;
  private submitting = false;

  constructor(
    private readonly client: HuecapClient,
    private readonly el: AppElements,
  ) {
    this.preview = new Preview(client);
    this.el.submit.addEventListener("click", () => void this.submit());
    this.el.fileInput.addEventListener("change", () => {
      const file = this.el.fileInput.files?.[0];
      if (file) void this.selectImage(file);
    });
  }

  async start(): Promise<void> {
    this.hideBanner();
    try {
      this.session = await this.client.createSession();
    } catch (err) {
      // no partial board: leave everything untouched and offer a retry
      this.showBanner(err, () => void this.start());
      return;
    }
    this.state = new BoardState(this.session.shuffled);
    this.board = new Board(this.el.board, this.session.palette, this.state, {
      onChange: () => this.onArrangementEdited(),
      onRejected: (reason) => this.setStatus(reason),
    });
    this.renderSampleButtons();
    this.setStatus("Arrange each row into a smooth color transition, then submit.");
    this.renderScore();
  }

  private onArrangementEdited(): void {
    // profile display tracks the scored submission, not the live edit
    this.renderScore();
    this.setStatus("Arrangement changed; submit to score it.");
  }

  async submit(): Promise<void> {
    if (!this.session || !this.state || this.submitting) return;
    this.submitting = true;
    this.el.submit.disabled = true;
    try {
      const response = await this.client.submitArrangement(
        this.session.session_id,
        this.state.toArrangement(),
      );
      this.state.applyResult(response.report, response.profile);
      this.renderScore();
      this.setStatus("Scored. Re-arrange and submit again to compare.");
      await this.refreshPreview();
    } catch (err) {
      // non-destructive: the arrangement stays on the board exactly as-is
      if (err instanceof ApiError && err.unreachable) {
        this.showBanner(err, () => void this.submit());
      } else {
        this.setStatus(`Submission rejected: ${describeError(err)}`);
      }
    } finally {
      this.submitting = false;
      this.el.submit.disabled = false;
    }
  }

  async selectImage(image: Blob): Promise<void> {
    this.preview.setImage(image);
    this.setObjectUrl(this.el.originalImg, image);
    this.el.correctedImg.removeAttribute("src");
    await this.refreshPreview();
  }

  private async refreshPreview(): Promise<void> {
    if (!this.session || !this.state || !this.preview.hasImage) return;
    if (this.state.profile === null) return;
    try {
      const result = await this.preview.refresh({ sessionId: this.session.session_id });
      this.setObjectUrl(this.el.correctedImg, result.corrected);
    } catch (err) {
      this.setStatus(`Preview failed: ${describeError(err)}`);
    }
  }

  private renderScore(): void {
    const state = this.state;
    const target = this.el.score;
    target.textContent = "";
    if (!state || !state.report || !state.profile) {
      target.textContent = "No score yet.";
      return;
    }
    const report = state.report;
    const item = (label: string, value: string): HTMLElement => {
      const div = document.createElement("div");
      div.className = "score-item";
      const dt = document.createElement("span");
      dt.className = "score-label";
      dt.textContent = label;
      const dd = document.createElement("span");
      dd.className = "score-value";
      dd.textContent = value;
      div.append(dt, dd);
      return div;
    };
    target.append(
      item("Scaled error", report.scaled.toFixed(1)),
      item("Row errors", report.row_errors.join(" / ")),
      item("Result", describeProfile(state.profile)),
    );
  }

  private renderSampleButtons(): void {
    this.el.sampleButtons.textContent = "";
    for (const path of SAMPLE_IMAGES) {
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = path.split("/").pop() ?? path;
      button.addEventListener("click", () => {
        void fetch(path)
          .then((resp) => resp.blob())
          .then((blob) => this.selectImage(blob))
          .catch((err) => this.setStatus(`Could not load sample: ${String(err)}`));
      });
      this.el.sampleButtons.appendChild(button);
    }
  }

  private setObjectUrl(img: HTMLImageElement, blob: Blob): void {
    const previous = img.dataset.objectUrl;
    if (previous) URL.revokeObjectURL(previous);
    const url = URL.createObjectURL(blob);
    img.dataset.objectUrl = url;
    img.src = url;
  }

  private setStatus(text: string): void {
    this.el.status.textContent = text;
  }

  private showBanner(err: unknown, retry: () => void): void {
    this.el.banner.textContent = "";
    this.el.banner.hidden = false;
    const text = document.createElement("span");
    text.textContent = `Service unavailable: ${describeError(err)} `;
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    this.el.banner.append(text, button);
  }

  private hideBanner(): void {
    this.el.banner.hidden = true;
    this.el.banner.textContent = "";
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}

import type { HuecapClient, RecolorSource } from "./api";

export interface PreviewResult {
  original: Blob;
  corrected: Blob;
}

/**
 * Holds the currently selected preview image and fetches its recolored
 * counterpart from the service.  All pixel work happens server side; this
 * class only moves blobs around.
 */
export class Preview {
  private original: Blob | null = null;

  constructor(private readonly client: HuecapClient) {}

  setImage(image: Blob): void {
    this.original = image;
  }

  get hasImage(): boolean {
    return this.original !== null;
  }

  async refresh(source: RecolorSource): Promise<PreviewResult> {
    if (this.original === null) {
      throw new Error("no preview image selected");
    }
    const corrected = await this.client.recolor(this.original, source, {
      mode: "correct",
      space: "linear",
    });
    return { original: this.original, corrected };
  }
}

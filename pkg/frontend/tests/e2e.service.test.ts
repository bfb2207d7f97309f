/**
 * End-to-end flow against a real service process: the typed client, board
 * state, and preview logic drive the same HTTP API the page uses.  Needs the
 * Python package installed (`pip install -e .` in the repository root); the
 * service is spawned on a free port for the duration of the file.
 */
import { type ChildProcess, spawn } from "node:child_process";
import { readFileSync } from "node:fs";
import net from "node:net";
import { fileURLToPath } from "node:url";
import { PNG } from "pngjs";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { HuecapClient } from "../src/api";
import { Preview } from "../src/preview";
import { BoardState } from "../src/state";
import { CAPS_PER_ROW, ROWS } from "../src/types";

const SAMPLE = fileURLToPath(new URL("../public/samples/hue-bands.png", import.meta.url));

let service: ChildProcess | null = null;
let stderrLog = "";
let base = "";
let client: HuecapClient;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = net.createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      const { port } = address;
      srv.close(() => resolve(port));
    });
    srv.on("error", reject);
  });
}

async function waitForService(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${url}/healthz`);
      if (resp.ok) return;
      lastError = new Error(`healthz status ${resp.status}`);
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up: ${String(lastError)}\n${stderrLog}`);
}

/** Reorder one row to a target permutation using only single-cap moves. */
function arrangeRow(state: BoardState, row: number, target: readonly number[]): void {
  for (let position = 0; position < target.length; position += 1) {
    const current = [...state.rowCaps(row)];
    const from = current.indexOf(target[position] as number);
    if (from !== position) state.moveCap(row, from, position);
  }
}

function decode(data: ArrayBuffer | Buffer): { width: number; height: number; data: Buffer } {
  return PNG.sync.read(Buffer.isBuffer(data) ? data : Buffer.from(data));
}

const identityRow = (): number[] =>
  Array.from({ length: CAPS_PER_ROW }, (_, i) => i + 1);
const reversedRow = (): number[] => identityRow().reverse();

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  service = spawn("python3", ["-m", "huecap.cli", "serve", "--port", String(port)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  service.stderr?.on("data", (chunk: Buffer) => {
    stderrLog += chunk.toString();
  });
  await waitForService(base, 60_000);
  client = new HuecapClient(base);
});

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("live service", () => {
  it("reports healthy", async () => {
    const health = await client.healthz();
    expect(health.kernel).toMatch(/compiled|python/);
  });

  it("identity arrangement scores as no deficiency and leaves the preview unchanged", async () => {
    const session = await client.createSession(1234);
    const state = new BoardState(session.shuffled);
    for (let row = 0; row < ROWS; row += 1) {
      arrangeRow(state, row, identityRow());
    }

    const result = await client.submitArrangement(session.session_id, state.toArrangement());
    state.applyResult(result.report, result.profile);
    expect(result.report.total).toBe(0);
    expect(result.profile).toEqual({ type: "none", severity: 0 });

    const original = readFileSync(SAMPLE);
    const preview = new Preview(client);
    preview.setImage(new Blob([original]));
    const { corrected } = await preview.refresh({ sessionId: session.session_id });
    const before = decode(original);
    const after = decode(await corrected.arrayBuffer());
    expect(after.width).toBe(before.width);
    expect(after.height).toBe(before.height);
    expect(after.data.equals(before.data)).toBe(true);
  });

  it("a red-green-confusion arrangement scores as deutan and visibly changes the preview", async () => {
    const session = await client.createSession(777);
    const state = new BoardState(session.shuffled);
    // heavy errors in rows 1 and 2, clean rows 3 and 4
    arrangeRow(state, 0, reversedRow());
    arrangeRow(state, 1, reversedRow());
    arrangeRow(state, 2, identityRow());
    arrangeRow(state, 3, identityRow());

    const result = await client.submitArrangement(session.session_id, state.toArrangement());
    expect(result.report.row_errors).toEqual([60, 60, 0, 0]);
    expect(result.report.scaled).toBeCloseTo(212.5, 10);
    expect(result.profile).toEqual({ type: "deutan", severity: 1 });

    const original = readFileSync(SAMPLE);
    const preview = new Preview(client);
    preview.setImage(new Blob([original]));
    const { corrected } = await preview.refresh({ sessionId: session.session_id });
    const before = decode(original);
    const after = decode(await corrected.arrayBuffer());
    expect(after.data.equals(before.data)).toBe(false);

    let changed = 0;
    for (let i = 0; i < before.data.length; i += 4) {
      if (
        before.data[i] !== after.data[i] ||
        before.data[i + 1] !== after.data[i + 1] ||
        before.data[i + 2] !== after.data[i + 2]
      ) {
        changed += 1;
      }
    }
    const totalPixels = before.width * before.height;
    expect(changed / totalPixels).toBeGreaterThan(0.5); // a visible shift, not noise
  });

  it("supports the re-test loop: rescoring replaces the stored profile", async () => {
    const session = await client.createSession(31);
    const state = new BoardState(session.shuffled);
    arrangeRow(state, 0, reversedRow());
    arrangeRow(state, 1, reversedRow());
    arrangeRow(state, 2, identityRow());
    arrangeRow(state, 3, identityRow());
    const first = await client.submitArrangement(session.session_id, state.toArrangement());
    expect(first.profile.type).toBe("deutan");

    for (let row = 0; row < ROWS; row += 1) arrangeRow(state, row, identityRow());
    const second = await client.submitArrangement(session.session_id, state.toArrangement());
    expect(second.profile.type).toBe("none");

    const refreshed = await client.getSession(session.session_id);
    expect(refreshed.profile).toEqual({ type: "none", severity: 0 });
    expect(refreshed.report?.total).toBe(0);
  });

  it("rejects a malformed submission without touching session state", async () => {
    const session = await client.createSession(55);
    const state = new BoardState(session.shuffled);
    for (let row = 0; row < ROWS; row += 1) arrangeRow(state, row, identityRow());
    await client.submitArrangement(session.session_id, state.toArrangement());

    const resp = await fetch(`${base}/sessions/${session.session_id}/arrangement`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ rows: [[1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]] }),
    });
    expect(resp.status).toBe(422);
    const refreshed = await client.getSession(session.session_id);
    expect(refreshed.report?.total).toBe(0); // previous result still present
  });
});

import type { BoardState } from "./state";
import type { PaletteDoc } from "./types";

export interface BoardCallbacks {
  /** Fired after any successful reorder. */
  onChange?: () => void;
  /** Fired when an interaction is rejected (e.g. targeting an anchor). */
  onRejected?: (reason: string) => void;
}

interface Selection {
  row: number;
  index: number;
}

/**
 * Renders the four-row cap board and wires up three reordering inputs that
 * all funnel into the same state mutation:
 *
 *  - HTML5 drag and drop between movable slots of one row,
 *  - click (or tap) to pick a cap up, click a destination to drop it,
 *  - arrow keys / Home / End on a focused cap.
 *
 * Anchor swatches at both ends of each row take no interactions at all.
 */
export class Board {
  private selection: Selection | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly palette: PaletteDoc,
    private readonly state: BoardState,
    private readonly callbacks: BoardCallbacks = {},
  ) {
    this.render();
  }

  /** Hex color for a cap id: the palette slot it belongs to when ordered. */
  private capHex(row: number, capId: number): string {
    const slots = this.palette.rows[row]?.slots ?? [];
    return slots[capId]?.hex ?? "#888888";
  }

  private anchorHex(row: number, slot: 0 | 12): string {
    return this.palette.rows[row]?.slots[slot]?.hex ?? "#888888";
  }

  render(): void {
    this.root.textContent = "";
    this.root.classList.add("board");
    for (let row = 0; row < 4; row += 1) {
      const rowEl = document.createElement("div");
      rowEl.className = "board-row";
      rowEl.dataset.row = String(row);
      rowEl.setAttribute("role", "listbox");
      rowEl.setAttribute("aria-label", `Row ${row + 1}`);
      rowEl.setAttribute("aria-orientation", "horizontal");
      if (this.state.rowTouched(row)) rowEl.classList.add("reviewed");

      rowEl.appendChild(this.anchorCell(row, 0));
      this.state.rowCaps(row).forEach((capId, index) => {
        rowEl.appendChild(this.capCell(row, index, capId));
      });
      rowEl.appendChild(this.anchorCell(row, 12));
      this.root.appendChild(rowEl);
    }
  }

  private anchorCell(row: number, slot: 0 | 12): HTMLElement {
    const cell = document.createElement("div");
    cell.className = "cap anchor";
    cell.style.backgroundColor = this.anchorHex(row, slot);
    cell.setAttribute("aria-disabled", "true");
    cell.setAttribute("aria-label", `Row ${row + 1} fixed reference color`);
    cell.dataset.row = String(row);
    cell.dataset.anchor = slot === 0 ? "start" : "end";
    // dropping or clicking here must not move anything
    cell.addEventListener("click", () => this.rejectAnchor());
    cell.addEventListener("drop", (event) => {
      event.preventDefault();
      this.rejectAnchor();
    });
    return cell;
  }

  private capCell(row: number, index: number, capId: number): HTMLElement {
    const cell = document.createElement("button");
    cell.type = "button";
    cell.className = "cap movable";
    cell.style.backgroundColor = this.capHex(row, capId);
    cell.draggable = true;
    cell.dataset.row = String(row);
    cell.dataset.index = String(index);
    cell.dataset.capId = String(capId);
    cell.setAttribute("role", "option");
    cell.setAttribute(
      "aria-label",
      `Row ${row + 1}, position ${index + 1} of 11. ` +
        `Press space to pick up, arrow keys to reorder.`,
    );
    if (this.selection && this.selection.row === row && this.selection.index === index) {
      cell.classList.add("selected");
      cell.setAttribute("aria-selected", "true");
    } else {
      cell.setAttribute("aria-selected", "false");
    }

    cell.addEventListener("click", () => this.handleClick(row, index));
    cell.addEventListener("keydown", (event) => this.handleKey(event, row, index));
    cell.addEventListener("dragstart", (event) => {
      this.selection = { row, index };
      event.dataTransfer?.setData("text/plain", `${row}:${index}`);
    });
    cell.addEventListener("dragover", (event) => event.preventDefault());
    cell.addEventListener("drop", (event) => {
      event.preventDefault();
      this.completeMove(row, index);
    });
    return cell;
  }

  private rejectAnchor(): void {
    this.selection = null;
    this.callbacks.onRejected?.("Anchor colors are fixed and cannot be moved.");
    this.render();
  }

  private handleClick(row: number, index: number): void {
    if (this.selection === null) {
      this.selection = { row, index };
      this.render();
      return;
    }
    this.completeMove(row, index);
  }

  private completeMove(row: number, index: number): void {
    const selection = this.selection;
    this.selection = null;
    if (selection === null) return;
    if (selection.row !== row) {
      this.callbacks.onRejected?.("Caps stay within their own row.");
      this.render();
      return;
    }
    if (selection.index !== index) {
      this.state.moveCap(row, selection.index, index);
      this.callbacks.onChange?.();
    }
    this.render();
  }

  private handleKey(event: KeyboardEvent, row: number, index: number): void {
    let moved = false;
    let focusIndex = index;
    switch (event.key) {
      case "ArrowLeft":
        moved = this.state.nudge(row, index, -1);
        if (moved) focusIndex = index - 1;
        break;
      case "ArrowRight":
        moved = this.state.nudge(row, index, 1);
        if (moved) focusIndex = index + 1;
        break;
      case "Home":
        if (index > 0) {
          this.state.moveCap(row, index, 0);
          moved = true;
          focusIndex = 0;
        }
        break;
      case "End":
        if (index < 10) {
          this.state.moveCap(row, index, 10);
          moved = true;
          focusIndex = 10;
        }
        break;
      case " ":
      case "Enter":
        event.preventDefault();
        this.handleClick(row, index);
        return;
      default:
        return;
    }
    event.preventDefault();
    if (moved) {
      this.selection = null;
      this.callbacks.onChange?.();
      this.render();
      this.focusCap(row, focusIndex);
    }
  }

  focusCap(row: number, index: number): void {
    const cell = this.root.querySelector<HTMLElement>(
      `[data-row="${row}"][data-index="${index}"]`,
    );
    cell?.focus();
  }

  /** Cap ids currently shown for a row, read back from the DOM. */
  domRowOrder(row: number): number[] {
    return Array.from(
      this.root.querySelectorAll<HTMLElement>(`button[data-row="${row}"]`),
      (el) => Number(el.dataset.capId),
    );
  }
}

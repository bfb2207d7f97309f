import { HuecapClient } from "./api";
import { App, type AppElements } from "./app";
import "./style.css";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

const elements: AppElements = {
  board: el("board"),
  banner: el("banner"),
  status: el("status"),
  score: el("score"),
  submit: el<HTMLButtonElement>("submit"),
  originalImg: el<HTMLImageElement>("preview-original"),
  correctedImg: el<HTMLImageElement>("preview-corrected"),
  fileInput: el<HTMLInputElement>("file-input"),
  sampleButtons: el("sample-buttons"),
};

const app = new App(new HuecapClient(), elements);
void app.start();

import { defineConfig } from "vite";

// The dev server proxies API calls to a locally running `huecap serve`
// instance so the page and the service share an origin.
export default defineConfig({
  server: {
    proxy: {
      "/healthz": "http://127.0.0.1:8765",
      "/sessions": "http://127.0.0.1:8765",
      "/recolor": "http://127.0.0.1:8765",
    },
  },
});

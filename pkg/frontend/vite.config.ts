import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // `taxlab serve` default address; the client itself uses relative URLs.
    proxy: { "/api": "http://127.0.0.1:8000" },
  },
  test: {
    environment: "jsdom",
  },
});

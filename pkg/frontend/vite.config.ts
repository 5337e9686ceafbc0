import { defineConfig } from "vitest/config";

export default defineConfig({
  build: {
    target: "es2020",
  },
  test: {
    environment: "jsdom",
    // the integration suite boots the real telemetry service once per file
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});

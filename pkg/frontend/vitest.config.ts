import { defineConfig } from 'vitest/config';

export default defineConfig({
    test: {
        environment: 'happy-dom',
        environmentOptions: {
            // the test server runs on its own 127.0.0.1 port, which the
            // simulated about:blank origin would otherwise refuse to call
            happyDOM: {
                settings: { fetch: { disableSameOriginPolicy: true } },
            },
        },
        globalSetup: './tests/globalSetup.ts',
        testTimeout: 30_000,
        hookTimeout: 120_000,
    },
});

/**
 * Entry point: load config, start the engine (exit nonzero before reading
 * any request on failure), then serve the wire protocol on stdin/stdout.
 */

import * as fs from "fs";

import { DEFAULT_CONFIG, ShimConfig, TesseractEngine } from "./engine";
import { serve } from "./serve";

function parseArgs(argv: string[]): { configPath: string | null } {
    let configPath: string | null = null;
    for (let i = 0; i < argv.length; i += 1) {
        if (argv[i] === "--config") {
            configPath = argv[i + 1] ?? null;
            i += 1;
        } else if (argv[i] === "--help" || argv[i] === "-h") {
            process.stderr.write("usage: main.js [--config <shim-config.json>]\n");
            process.exit(0);
        } else {
            process.stderr.write(`unknown argument: ${argv[i]}\n`);
            process.exit(1);
        }
    }
    return { configPath };
}

function loadConfig(path: string | null): ShimConfig {
    if (path === null) {
        return { ...DEFAULT_CONFIG };
    }
    const parsed = JSON.parse(fs.readFileSync(path, "utf-8"));
    return { ...DEFAULT_CONFIG, ...parsed };
}

/**
 * The engine may chat on stdout (wasm progress noise); only protocol lines
 * are allowed through, everything else is diverted to stderr.
 */
function guardStdout(): (line: string) => void {
    const realWrite = process.stdout.write.bind(process.stdout);
    let emitting = false;
    process.stdout.write = ((chunk: never, encoding?: never, callback?: never) => {
        if (emitting) {
            return realWrite(chunk, encoding, callback);
        }
        return process.stderr.write(chunk, encoding, callback);
    }) as typeof process.stdout.write;
    return (line: string) => {
        emitting = true;
        realWrite(`${line}\n`);
        emitting = false;
    };
}

async function main(): Promise<void> {
    const { configPath } = parseArgs(process.argv.slice(2));
    const emit = guardStdout();

    let config: ShimConfig;
    let engine: TesseractEngine;
    try {
        config = loadConfig(configPath);
        engine = await TesseractEngine.create(config);
    } catch (error) {
        process.stderr.write(`ocr_shim startup failed: ${(error as Error).message}\n`);
        process.exit(1);
    }

    try {
        await serve(engine, process.stdin, emit);
    } finally {
        await engine.close();
    }
    process.exit(0);
}

void main();

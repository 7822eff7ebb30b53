/**
 * Request loop: one newline-delimited JSON request per line on the input
 * stream, one response per request in order. Malformed lines produce error
 * responses and the loop keeps serving; EOF ends the loop cleanly.
 */

import * as fs from "fs";
import * as readline from "readline";
import type { Readable } from "stream";

import { TesseractEngine } from "./engine";
import { BackendResponse, errorResponse, okResponse, validateRequest } from "./protocol";

export type Emit = (line: string) => void;

async function handle(engine: TesseractEngine, rawLine: string): Promise<BackendResponse> {
    let parsed: unknown;
    try {
        parsed = JSON.parse(rawLine);
    } catch (error) {
        return errorResponse("", "ProtocolError", `invalid JSON: ${(error as Error).message}`);
    }
    let request;
    try {
        request = validateRequest(parsed);
    } catch (error) {
        const id = typeof (parsed as { id?: unknown })?.id === "string"
            ? (parsed as { id: string }).id : "";
        return errorResponse(id, "ProtocolError", (error as Error).message);
    }
    if (request.task !== "ocr") {
        return errorResponse(request.id, "UnsupportedTask",
            `this shim only serves ocr requests, got ${request.task}`);
    }

    const imagePath = request.payload.image_path;
    const imageB64 = request.payload.image_b64;
    let buffer: Buffer;
    try {
        if (typeof imagePath === "string") {
            buffer = fs.readFileSync(imagePath);
        } else if (typeof imageB64 === "string") {
            buffer = Buffer.from(imageB64, "base64");
        } else {
            return errorResponse(request.id, "ProtocolError",
                "ocr payload needs image_path or image_b64");
        }
    } catch (error) {
        return errorResponse(request.id, "DecodeError", (error as Error).message);
    }

    try {
        const recognition = await engine.recognizeBuffer(buffer);
        return okResponse(request.id, {
            lines: recognition.lines,
            meta: recognition.meta,
        });
    } catch (error) {
        return errorResponse(request.id, "EngineError", (error as Error).message);
    }
}

export async function serve(engine: TesseractEngine, input: Readable, emit: Emit): Promise<void> {
    const lines = readline.createInterface({ input, crlfDelay: Infinity });
    for await (const line of lines) {
        if (!line.trim()) {
            continue;
        }
        const response = await handle(engine, line); // one request in flight
        emit(JSON.stringify(response));
    }
}

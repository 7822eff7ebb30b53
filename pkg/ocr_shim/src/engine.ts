/**
 * Text-recognition engine wrapper.
 *
 * Hosts tesseract.js with fully offline language data (the
 * @tesseract.js-data packages). The engine must load at startup; callers
 * exit nonzero before serving any request when it cannot.
 */

import * as fs from "fs";

export interface ShimConfig {
    engine: string;
    languages: string[];
    detection_model?: string | null;
    recognition_model?: string | null;
    device?: string | null;
    /** Directory holding <lang>.traineddata(.gz); resolved from the data
     *  package when omitted and only "eng" is requested. */
    lang_path?: string | null;
}

export const DEFAULT_CONFIG: ShimConfig = {
    engine: "tesseract.js",
    languages: ["eng"],
    detection_model: null,
    recognition_model: null,
    device: "cpu",
    lang_path: null,
};

export interface RecognizedLine {
    text: string;
    bbox: [number, number, number, number]; // x, y, w, h
    confidence: number; // within [0, 1]
}

export interface Recognition {
    lines: RecognizedLine[];
    meta: { engine: string; version: string };
}

function resolveLangPath(config: ShimConfig): string {
    if (config.lang_path) {
        return config.lang_path;
    }
    if (config.languages.length === 1 && config.languages[0] === "eng") {
        // eslint-disable-next-line @typescript-eslint/no-var-requires
        const data = require("@tesseract.js-data/eng");
        return data.langPath as string;
    }
    throw new Error(
        "config must set lang_path when requesting languages other than [\"eng\"]",
    );
}

/** Width/height from a PNG IHDR header, or null for other formats. */
export function pngSize(buffer: Buffer): [number, number] | null {
    const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    if (buffer.length < 24 || !buffer.subarray(0, 8).equals(signature)) {
        return null;
    }
    return [buffer.readUInt32BE(16), buffer.readUInt32BE(20)];
}

export class TesseractEngine {
    private constructor(
        private readonly worker: import("tesseract.js").Worker,
        private readonly version: string,
    ) {}

    static async create(config: ShimConfig): Promise<TesseractEngine> {
        if (config.engine !== "tesseract.js") {
            throw new Error(`unknown engine ${JSON.stringify(config.engine)}`);
        }
        if (config.detection_model || config.recognition_model) {
            // tesseract.js has no pluggable detection/recognition pairing;
            // note the fallback instead of silently ignoring the request.
            console.error(
                "ocr_shim: detection/recognition model selection is not supported by "
                + "tesseract.js; using engine defaults",
            );
        }
        const { createWorker, OEM } = require("tesseract.js");
        const worker = await createWorker(config.languages.join("+"), OEM.LSTM_ONLY, {
            langPath: resolveLangPath(config),
            gzip: true,
            cacheMethod: "none",
            logger: () => undefined,
        });
        const version = require("tesseract.js/package.json").version as string;
        return new TesseractEngine(worker, `tesseract.js ${version}`);
    }

    async recognize(imagePath: string): Promise<Recognition> {
        const buffer = fs.readFileSync(imagePath);
        return this.recognizeBuffer(buffer);
    }

    async recognizeBuffer(buffer: Buffer): Promise<Recognition> {
        const size = pngSize(buffer);
        const { data } = await this.worker.recognize(buffer, {}, { blocks: true, text: true });
        const lines: RecognizedLine[] = [];
        for (const block of data.blocks ?? []) {
            for (const paragraph of block.paragraphs ?? []) {
                for (const line of paragraph.lines ?? []) {
                    const text = line.text.replace(/\s+$/u, "");
                    if (!text) {
                        continue;
                    }
                    let x0 = Math.max(0, Math.floor(line.bbox.x0));
                    let y0 = Math.max(0, Math.floor(line.bbox.y0));
                    let x1 = Math.ceil(line.bbox.x1);
                    let y1 = Math.ceil(line.bbox.y1);
                    if (size !== null) {
                        x1 = Math.min(x1, size[0]);
                        y1 = Math.min(y1, size[1]);
                        x0 = Math.min(x0, x1);
                        y0 = Math.min(y0, y1);
                    }
                    lines.push({
                        text,
                        bbox: [x0, y0, Math.max(0, x1 - x0), Math.max(0, y1 - y0)],
                        confidence: Math.min(1, Math.max(0, line.confidence / 100)),
                    });
                }
            }
        }
        const reported = (data as { version?: string }).version;
        return {
            lines,
            meta: { engine: "tesseract.js", version: reported ?? this.version },
        };
    }

    async close(): Promise<void> {
        await this.worker.terminate();
    }
}

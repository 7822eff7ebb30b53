"""timtbench: a benchmark harness for text-image machine translation.

Pieces: synthetic bilingual image-corpus generation, a modular OCR-then-
translate pipeline with pluggable backends and prompt templates, a
from-scratch metric suite (BLEU, chrF, TER, WER, CER) built on per-sentence
sufficient statistics, paired approximate-randomization significance
testing, and result-table emission.
"""

__version__ = "0.1.0"

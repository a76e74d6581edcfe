"""Expected bit-flip counts and seeded bit-flip injection with MSB/LSB banks.

Each bit's fate is drawn from the SplitMix64 sequence at position
``word_index * word_width + bit_index`` for the given seed, so the result
does not depend on chunking, traversal order or worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError

SCHEMA_VERSION = 1
WORD_DTYPES = {8: np.dtype("<u1"), 16: np.dtype("<u2")}

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_CHUNK_WORDS = 1 << 13


@dataclass(frozen=True)
class BerTriple:
    rf: float = 0.0
    rd: float = 0.0
    we: float = 0.0

    def __post_init__(self):
        for key in ("rf", "rd", "we"):
            value = getattr(self, key)
            if not 0.0 <= value < 1.0:
                raise ValidationError(f"BER {key} must lie in [0, 1), got {value!r}")
        if not self.cumulative < 1.0:
            raise ValidationError("cumulative BER must stay below 1")

    @property
    def cumulative(self) -> float:
        # union bound of the three independent sources
        return self.rf + self.rd + self.we


@dataclass(frozen=True)
class BerProfile:
    """Per-bit error rates, optionally split into an MSB and an LSB bank."""

    ber_rf: float = 0.0
    ber_rd: float = 0.0
    ber_we: float = 0.0
    msb_bank: Optional[BerTriple] = None
    lsb_bank: Optional[BerTriple] = None
    split_bit: Optional[int] = None

    def __post_init__(self):
        BerTriple(self.ber_rf, self.ber_rd, self.ber_we)
        if (self.msb_bank is None) != (self.lsb_bank is None):
            raise ValidationError("dual-bank profile needs both msb_bank and lsb_bank")

    @classmethod
    def dual_bank(cls, msb=1e-8, lsb=1e-5):
        """Each source at ``msb`` in the upper half of a word, ``lsb`` in the lower half."""
        return cls(msb_bank=BerTriple(msb, msb, msb), lsb_bank=BerTriple(lsb, lsb, lsb))

    @property
    def is_split(self) -> bool:
        return self.msb_bank is not None

    def bank_rates(self):
        """Cumulative (msb, lsb) rates; equal when the profile is not split."""
        if self.is_split:
            return self.msb_bank.cumulative, self.lsb_bank.cumulative
        rate = self.ber_rf + self.ber_rd + self.ber_we
        return rate, rate

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "BerProfile":
        allowed = {"ber_rf", "ber_rd", "ber_we", "msb_bank", "lsb_bank", "split_bit"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValidationError(f"ber: unknown field(s) {sorted(unknown)}")
        doc = dict(doc)
        for key in ("msb_bank", "lsb_bank"):
            if doc.get(key) is not None:
                bank = doc[key]
                extra = set(bank) - {"rf", "rd", "we"}
                if extra:
                    raise ValidationError(f"ber.{key}: unknown field(s) {sorted(extra)}")
                doc[key] = BerTriple(**bank)
        return cls(**doc)


def split_masks(word_width):
    """(msb_mask, lsb_mask) covering the upper and lower halves of a word."""
    if word_width not in WORD_DTYPES:
        raise ValidationError(f"word_width must be 8 or 16, got {word_width!r}")
    half = word_width // 2
    lsb = (1 << half) - 1
    return lsb << half, lsb


def expected_flips(n_bits, profile: BerProfile) -> float:
    if n_bits < 0:
        raise ValidationError(f"n_bits must be >= 0, got {n_bits!r}")
    msb, lsb = profile.bank_rates()
    if profile.is_split:
        return n_bits / 2 * msb + n_bits / 2 * lsb
    return n_bits * msb


def _splitmix(index: np.ndarray, seed: int) -> np.ndarray:
    """SplitMix64 output at each counter value; overwrites ``index``."""
    z = index
    z += np.uint64(1)
    z *= _GOLDEN
    z += np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    tmp = np.empty_like(z)
    for shift, mult in ((30, _M1), (27, _M2)):
        np.right_shift(z, np.uint64(shift), out=tmp)
        z ^= tmp
        z *= mult
    np.right_shift(z, np.uint64(31), out=tmp)
    z ^= tmp
    return z


def _thresholds(word_width, profile):
    """Per-bit-position threshold on the raw 64-bit hash.

    A bit flips when ``(h >> 11) < floor(p * 2**53)``, which for integers is
    the same as ``h < floor(p * 2**53) << 11``.
    """
    msb, lsb = profile.bank_rates()
    half = word_width // 2
    rates = np.array([lsb] * half + [msb] * half)
    return np.floor(rates * 2.0 ** 53).astype(np.uint64) << np.uint64(11)


@dataclass
class InjectionResult:
    words: np.ndarray
    msb_flips: int
    lsb_flips: int
    word_index: np.ndarray
    bit_index: np.ndarray

    @property
    def flip_count(self) -> int:
        return self.msb_flips + self.lsb_flips


def _inject_chunk(words, start, word_width, thresholds, seed):
    n = len(words)
    base = np.arange(start, start + n, dtype=np.uint64) * np.uint64(word_width)
    positions = base[:, None] + np.arange(word_width, dtype=np.uint64)[None, :]
    hit = _splitmix(positions, seed) < thresholds[None, :]
    rows, bits = np.nonzero(hit)
    out = words.copy()
    if len(rows):
        masks = (np.uint64(1) << bits.astype(np.uint64)).astype(words.dtype)
        np.bitwise_xor.at(out, rows, masks)
    return out, rows + start, bits


def inject(words, word_width, profile: BerProfile, seed, workers=1) -> InjectionResult:
    """Flip each bit independently with its bank's cumulative BER.

    Returns a mutated copy; ``words`` is left untouched. ``workers`` only
    changes speed, never the result.
    """
    if word_width not in WORD_DTYPES:
        raise ValidationError(f"word_width must be 8 or 16, got {word_width!r}")
    if profile.split_bit is not None and profile.split_bit != word_width // 2:
        raise ValidationError(f"split_bit must be {word_width // 2} for {word_width}-bit words")
    words = np.asarray(words)
    if words.ndim != 1 or words.size == 0:
        raise ValidationError("words must be a non-empty 1-D array")
    if words.dtype.kind not in "ui" or (words.size and (words.min() < 0 or int(words.max()) >> word_width)):
        raise ValidationError(f"words must be unsigned integers below 2**{word_width}")
    words = words.astype(WORD_DTYPES[word_width])
    thresholds = _thresholds(word_width, profile)

    starts = range(0, len(words), _CHUNK_WORDS)
    job = lambda s: _inject_chunk(words[s:s + _CHUNK_WORDS], s, word_width, thresholds, seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(s) for s in starts]

    out = np.concatenate([p[0] for p in parts])
    word_index = np.concatenate([p[1] for p in parts]).astype(np.int64)
    bit_index = np.concatenate([p[2] for p in parts]).astype(np.int64)
    msb = int(np.count_nonzero(bit_index >= word_width // 2))
    return InjectionResult(out, msb, len(bit_index) - msb, word_index, bit_index)


# -- file interface ---------------------------------------------------------

def read_words(path, word_width) -> np.ndarray:
    if word_width not in WORD_DTYPES:
        raise ValidationError(f"word_width must be 8 or 16, got {word_width!r}")
    return np.fromfile(path, dtype=WORD_DTYPES[word_width])


def write_words(path, words, word_width):
    np.asarray(words, dtype=WORD_DTYPES[word_width]).tofile(path)


def sidecar_dict(result: InjectionResult, profile: BerProfile, seed, word_width) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": int(seed),
        "word_width": word_width,
        "n_words": int(len(result.words)),
        "profile": profile.to_dict(),
        "flips": {"msb": result.msb_flips, "lsb": result.lsb_flips, "total": result.flip_count},
        "positions": [[int(w), int(b)] for w, b in zip(result.word_index, result.bit_index)],
    }


def write_sidecar(path, result, profile, seed, word_width):
    with open(path, "w") as fh:
        json.dump(sidecar_dict(result, profile, seed, word_width), fh)
        fh.write("\n")

"""Polarity lexicon, tweet classification and per-user Subjective Well-Being."""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, Sequence

from swb_assort.errors import ConfigError, IngestionError, LexiconError

logger = logging.getLogger(__name__)

POLARITIES = ("positive", "negative")
STRENGTHS = ("weak", "strong")
COUNT_MODES = ("tweet", "occurrence")
MAX_TEXT_BYTES = 560
NO_EMOTIONAL_CONTENT = "no_emotional_content"

_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")


@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[str, tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(
            self, "_positive", frozenset(t for t, (p, _) in self.entries.items() if p == "positive")
        )
        object.__setattr__(
            self, "_negative", frozenset(t for t, (p, _) in self.entries.items() if p == "negative")
        )

    @property
    def positive(self) -> frozenset[str]:
        return self._positive

    @property
    def negative(self) -> frozenset[str]:
        return self._negative

    @property
    def counts(self) -> dict[str, int]:
        return {"positive": len(self._positive), "negative": len(self._negative)}

    def polarity(self, term: str) -> str | None:
        entry = self.entries.get(term.lower())
        return entry[0] if entry else None

    def __len__(self) -> int:
        return len(self.entries)


def parse_lexicon(lines: Iterable[str], source: str = "<lexicon>") -> Lexicon:
    """Parse ``term polarity strength`` lines (tab or whitespace separated)."""
    entries: dict[str, tuple[str, str]] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        parts = [p.strip() for p in parts if p.strip()]
        if len(parts) != 3:
            raise LexiconError(f"expected 'term<TAB>polarity<TAB>strength', got {line!r}", line=lineno, path=source)
        term, polarity, strength = parts[0].lower(), parts[1].lower(), parts[2].lower()
        if polarity not in POLARITIES:
            raise LexiconError(f"unknown polarity {parts[1]!r}", line=lineno, path=source)
        if strength not in STRENGTHS:
            raise LexiconError(f"unknown strength {parts[2]!r}", line=lineno, path=source)
        if term in entries:
            if entries[term][0] != polarity:
                raise LexiconError(
                    f"term {term!r} listed as both {entries[term][0]} and {polarity}",
                    line=lineno,
                    path=source,
                )
            logger.warning("%s:%d: duplicate lexicon term %r ignored", source, lineno, term)
            continue
        entries[term] = (polarity, strength)
    if not entries:
        raise LexiconError("lexicon is empty", path=source)
    return Lexicon(entries)


def load_lexicon(path) -> Lexicon:
    try:
        with open(path, encoding="utf-8") as fh:
            lex = parse_lexicon(fh, source=str(path))
    except (OSError, UnicodeDecodeError) as exc:
        raise LexiconError(str(exc), path=path) from None
    logger.info("lexicon %s: %d positive, %d negative", path, len(lex.positive), len(lex.negative))
    return lex


def write_lexicon(lex: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for term in sorted(lex.entries):
            polarity, strength = lex.entries[term]
            fh.write(f"{term}\t{polarity}\t{strength}\n")


def tokenize(text: str) -> list[str]:
    """Lower-cased alphanumeric runs; an apostrophe between letters stays inside the word."""
    return _TOKEN_RE.findall(text.replace("’", "'").lower())


def classify_tweet(tokens: Sequence[str], lex: Lexicon, mode: str = "tweet") -> tuple[int, int]:
    """(positive, negative) increments for one tweet.

    ``tweet`` mode gives presence flags, ``occurrence`` mode raw term counts.
    """
    if mode not in COUNT_MODES:
        raise ConfigError(f"unknown count mode {mode!r}")
    pos = sum(1 for t in tokens if t in lex.positive)
    neg = sum(1 for t in tokens if t in lex.negative)
    if mode == "tweet":
        return int(pos > 0), int(neg > 0)
    return pos, neg


@dataclass(frozen=True)
class TweetRecord:
    user_id: str
    ts: datetime
    type: str
    text: str


def _parse_ts(value: str) -> datetime:
    s = value.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    ts = datetime.fromisoformat(s)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_tweet(obj, line: int | None = None, path=None) -> TweetRecord:
    if not isinstance(obj, dict):
        raise IngestionError("tweet record must be a JSON object", line=line, path=path)
    for key in ("user_id", "ts", "type", "text"):
        if key not in obj:
            raise IngestionError(f"missing field {key!r}", line=line, path=path)
    user, ts, kind, text = obj["user_id"], obj["ts"], obj["type"], obj["text"]
    if not isinstance(user, str) or not user:
        raise IngestionError("user_id must be a non-empty string", line=line, path=path)
    if not isinstance(kind, str) or not isinstance(text, str) or not isinstance(ts, str):
        raise IngestionError("ts, type and text must be strings", line=line, path=path)
    if len(text.encode("utf-8")) > MAX_TEXT_BYTES:
        raise IngestionError(f"text longer than {MAX_TEXT_BYTES} bytes", line=line, path=path)
    try:
        when = _parse_ts(ts)
    except ValueError:
        raise IngestionError(f"unparseable timestamp {ts!r}", line=line, path=path) from None
    return TweetRecord(user, when, kind, text)


def iter_tweets(path) -> Iterator[TweetRecord]:
    """Stream records from a JSON Lines file."""
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestionError(f"invalid JSON ({exc.msg})", line=lineno, path=path) from None
                yield parse_tweet(obj, line=lineno, path=path)
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(str(exc), path=path) from None


def write_tweets(records: Iterable[TweetRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            obj = {
                "user_id": r.user_id,
                "ts": r.ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                "type": r.type,
                "text": r.text,
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class UserSentimentCounts:
    user_id: str
    n_pos: int
    n_neg: int
    n_total: int
    # tweets with at least one lexicon hit
    n_emotional: int = 0

    @property
    def emotionality(self) -> float:
        """Fraction of tweets with any lexicon hit.  Not an SWB quantity."""
        return self.n_emotional / self.n_total if self.n_total else 0.0


@dataclass(frozen=True)
class SwbEntry:
    swb: float
    counts: UserSentimentCounts

    @property
    def no_emotional_content(self) -> bool:
        return self.counts.n_pos + self.counts.n_neg == 0

    @property
    def flag(self) -> str:
        return NO_EMOTIONAL_CONTENT if self.no_emotional_content else ""


class SwbScores(Mapping):
    """User id -> :class:`SwbEntry`, iterated in sorted id order."""

    def __init__(self, entries: Mapping[str, SwbEntry] | Iterable[tuple[str, SwbEntry]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self._entries = dict(sorted(items))

    def __getitem__(self, user: str) -> SwbEntry:
        return self._entries[user]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def swb(self) -> dict[str, float]:
        return {u: e.swb for u, e in self._entries.items()}

    @classmethod
    def from_values(cls, values: Mapping[str, float]) -> "SwbScores":
        """Wrap bare scores (e.g. synthetic ones) with empty counts."""
        out = {}
        for u, s in values.items():
            s = float(s)
            if not -1.0 <= s <= 1.0:
                raise ValueError(f"score {s} for {u!r} outside [-1, 1]")
            out[u] = SwbEntry(s, UserSentimentCounts(u, 0, 0, 0))
        return cls(out)

    def __repr__(self) -> str:
        return f"SwbScores({len(self._entries)} users)"


def swb_value(n_pos: int, n_neg: int) -> float:
    """(N_p - N_n) / (N_p + N_n), and 0 when there is nothing to count."""
    total = n_pos + n_neg
    if total == 0:
        return 0.0
    return (n_pos - n_neg) / total


def score_user(
    timeline: Iterable[TweetRecord | str], lex: Lexicon, mode: str = "tweet", user_id: str | None = None
) -> SwbEntry:
    """Score one user's timeline.  Items may be records or bare tweet texts."""
    n_pos = n_neg = n_total = n_emo = 0
    for tweet in timeline:
        if isinstance(tweet, TweetRecord):
            user_id = user_id or tweet.user_id
            text = tweet.text
        else:
            text = tweet
        p, n = classify_tweet(tokenize(text), lex, mode)
        n_pos += p
        n_neg += n
        n_total += 1
        n_emo += p > 0 or n > 0
    counts = UserSentimentCounts(user_id or "", n_pos, n_neg, n_total, n_emo)
    return SwbEntry(swb_value(n_pos, n_neg), counts)


def group_timelines(tweets: Iterable[TweetRecord], users=None) -> dict[str, list[TweetRecord]]:
    keep = set(users) if users is not None else None
    timelines: dict[str, list[TweetRecord]] = defaultdict(list)
    for t in tweets:
        if keep is None or t.user_id in keep:
            timelines[t.user_id].append(t)
    return timelines


def score_users(tweets: Iterable[TweetRecord], lex: Lexicon, mode: str = "tweet", users=None) -> SwbScores:
    """Score every user (or only ``users``) that has at least one tweet."""
    if mode not in COUNT_MODES:
        raise ConfigError(f"unknown count mode {mode!r}")
    timelines = group_timelines(tweets, users)
    return SwbScores({u: score_user(tl, lex, mode, user_id=u) for u, tl in timelines.items()})


def tweet_counts(tweets: Iterable[TweetRecord]) -> dict[str, int]:
    counts: dict[str, int] = defaultdict(int)
    for t in tweets:
        counts[t.user_id] += 1
    return dict(counts)


SCORES_HEADER = ["user_id", "swb", "n_pos", "n_neg", "n_total", "flag"]


def write_scores(scores: SwbScores, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCORES_HEADER)
        for u, e in scores.items():
            c = e.counts
            w.writerow([u, repr(e.swb), c.n_pos, c.n_neg, c.n_total, e.flag])


def read_scores(path) -> SwbScores:
    out = {}
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != SCORES_HEADER:
                raise IngestionError(f"expected header {','.join(SCORES_HEADER)}", line=1, path=path)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    u, swb, n_pos, n_neg, n_total, _flag = row
                    counts = UserSentimentCounts(u, int(n_pos), int(n_neg), int(n_total))
                    out[u] = SwbEntry(float(swb), counts)
                except ValueError:
                    raise IngestionError(f"malformed score row {row!r}", line=lineno, path=path) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(str(exc), path=path) from None
    return SwbScores(out)


@dataclass(frozen=True)
class HistogramBin:
    center: float
    low: float
    high: float
    count: int
    probability_pct: float
    cumulative_pct: float


@dataclass(frozen=True)
class SwbHistogram:
    bin_width: float
    n: int
    bins: tuple[HistogramBin, ...]
    excluded_zero: int = 0

    def quantile(self, q: float) -> float:
        """Upper edge of the first bin whose cumulative share reaches ``q``."""
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must be in [0, 1]")
        target = 100.0 * q
        for b in self.bins:
            if b.cumulative_pct >= target - 1e-12:
                return b.high
        return self.bins[-1].high

    def to_rows(self) -> list[dict]:
        return [b.__dict__.copy() for b in self.bins]


HISTOGRAM_HEADER = ["bin_center", "bin_low", "bin_high", "count", "probability_pct", "cumulative_pct"]


def swb_distribution(scores, bin_width: float = 0.05, exclude_zero: bool = False) -> SwbHistogram:
    """Probability (%) and cumulative (%) of scores over [-1, 1].

    Bins are centred on integer multiples of ``bin_width`` so that SWB = 0
    sits in the middle of its own bin.  ``exclude_zero`` drops users whose
    score is exactly 0.
    """
    if not bin_width > 0:
        raise ConfigError("bin_width must be positive")
    if isinstance(scores, SwbScores):
        values = [e.swb for e in scores.values()]
    elif isinstance(scores, Mapping):
        values = [float(v) for v in scores.values()]
    else:
        values = [float(v) for v in scores]
    excluded = 0
    if exclude_zero:
        kept = [v for v in values if v != 0.0]
        excluded = len(values) - len(kept)
        values = kept
    if not values:
        raise ConfigError("no scores to bin")

    half_bins = math.ceil(1.0 / bin_width - 0.5 - 1e-9)
    n_bins = 2 * half_bins + 1
    lo_edge = -(half_bins + 0.5) * bin_width
    counts = [0] * n_bins
    for v in values:
        i = math.floor((v - lo_edge) / bin_width)
        counts[min(max(i, 0), n_bins - 1)] += 1

    n = len(values)
    bins = []
    running = 0
    for i, c in enumerate(counts):
        running += c
        center = (i - half_bins) * bin_width
        bins.append(
            HistogramBin(
                center=center,
                low=center - bin_width / 2,
                high=center + bin_width / 2,
                count=c,
                probability_pct=100.0 * c / n,
                cumulative_pct=100.0 * running / n,
            )
        )
    return SwbHistogram(bin_width, n, tuple(bins), excluded)


def write_histogram(hist: SwbHistogram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTOGRAM_HEADER)
        for b in hist.bins:
            w.writerow(
                [
                    f"{b.center:.6f}",
                    f"{b.low:.6f}",
                    f"{b.high:.6f}",
                    b.count,
                    f"{b.probability_pct:.6f}",
                    f"{b.cumulative_pct:.6f}",
                ]
            )

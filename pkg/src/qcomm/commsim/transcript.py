"""Messages, transcripts and public coins for two-party protocols.

A message is a bit array made of named segments.  Every segment length is
computed by the sender from information both players share at that point
(the transcript so far plus earlier segments of the same message), and the
receiver re-derives it while parsing.  ``Transcript.send`` refuses a message
whose bits disagree with the declared lengths.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from .problems import ALICE, BOB


def other(player: str) -> str:
    return BOB if player == ALICE else ALICE


@dataclass(frozen=True)
class Message:
    round: int
    sender: str
    bits: np.ndarray
    segments: tuple  # ((name, declared_length), ...)

    @property
    def declared(self) -> int:
        return sum(length for _, length in self.segments)

    def __len__(self) -> int:
        return int(self.bits.size)


class Transcript:
    def __init__(self, first_sender: str | None = None):
        self.messages: list[Message] = []
        self.first_sender = first_sender

    def send(self, sender: str, segments=()) -> Message:
        """Append a message built from ``(name, declared_length, bits)`` triples."""
        if sender not in (ALICE, BOB):
            raise ValueError(f"unknown player {sender!r}")
        if self.messages:
            if self.messages[-1].sender == sender:
                raise ValueError(f"{sender} sent twice in a row")
        elif self.first_sender is not None and sender != self.first_sender:
            raise ValueError(f"{self.first_sender} must send the first message")
        parts, decl = [], []
        for name, length, bits in segments:
            bits = np.asarray(bits, dtype=np.uint8).ravel()
            if bits.size != length:
                raise ValueError(f"segment {name!r}: {bits.size} bits, declared {length}")
            parts.append(bits)
            decl.append((name, int(length)))
        bits = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)
        msg = Message(len(self.messages) + 1, sender, bits, tuple(decl))
        self.messages.append(msg)
        return msg

    def __len__(self) -> int:
        return len(self.messages)

    def __iter__(self):
        return iter(self.messages)

    @property
    def total_bits(self) -> int:
        return sum(len(m) for m in self.messages)

    @property
    def per_round_bits(self) -> list[int]:
        return [len(m) for m in self.messages]

    @property
    def declared_lengths(self) -> list[int]:
        return [m.declared for m in self.messages]

    def is_consistent(self) -> bool:
        """Declared lengths match actual lengths and senders alternate."""
        ok = all(m.declared == len(m) for m in self.messages)
        return ok and all(a.sender != b.sender for a, b in zip(self.messages, self.messages[1:]))


class BitReader:
    """Receiver-side parser that consumes a message segment by segment."""

    def __init__(self, msg: Message):
        self.msg = msg
        self.pos = 0

    def take(self, length: int) -> np.ndarray:
        end = self.pos + length
        if end > len(self.msg):
            raise ValueError("message shorter than the receiver expects")
        out = self.msg.bits[self.pos:end]
        self.pos = end
        return out

    def ints(self, count: int, width: int) -> np.ndarray:
        return kernels.unpack_fixed(self.take(count * width), width)

    def int(self, width: int) -> int:
        return int(self.ints(1, width)[0]) if width else 0

    def done(self):
        if self.pos != len(self.msg):
            raise ValueError(f"{len(self.msg) - self.pos} unread bits in message {self.msg.round}")


@dataclass
class PublicCoins:
    """Shared random bits: a counter-based Philox stream keyed by ``seed``.

    Both players construct it from the same seed, so they see the same
    stream; ``draws`` counts how many samples have been taken.
    """

    seed: int
    draws: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        ss = self.seed if isinstance(self.seed, np.random.SeedSequence) else np.random.SeedSequence(self.seed)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def sample(self, n: int, size: int) -> np.ndarray:
        """Sorted sample of ``size`` distinct elements of ``range(n)``."""
        self.draws += 1
        return np.sort(self._gen.choice(n, size=size, replace=False))

    def integers(self, low: int, high: int, size=None):
        self.draws += 1
        return self._gen.integers(low, high, size=size)

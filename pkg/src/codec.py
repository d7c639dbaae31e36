"""Bit-exact integer and letter encodings.

Three integer encodings are provided: the binary expansion (most significant
bit first), the doubling encoding (every bit of the binary expansion written
twice) and the hat encoding, a simple prefix-free code made of the doubled
length of the binary expansion, the delimiter "01", then the binary expansion.
Doubled pairs are "00" or "11", so "01" is unambiguous and any concatenation of
hat codes decodes back to its integers.

Letters of an alphabet {1, ..., k} are written at a fixed width of
floor(log2 k) + 1 bits, letter a as the binary expansion of a - 1.

Bit strings are `bitarray` objects; they render as ASCII '0'/'1' via `to01()`.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

from bitarray import bitarray
from bitarray.util import ba2int, int2ba

from src.exceptions import *

BitString = bitarray

DELIMITER = bitarray("01")


def as_bits(value: str | bitarray | Iterable[int]) -> bitarray:
    """Coerces an ASCII '0'/'1' string or an iterable of bits to a bitarray.

    Args:
        value (str | bitarray | Iterable[int]): The bits.

    Returns:
        bitarray: A fresh bitarray holding the same bits.

    Raises:
        CodecError: If a string contains characters other than '0' and '1'.
    """

    if isinstance(value, bitarray):
        return bitarray(value)
    if isinstance(value, str):
        if any(c not in "01" for c in value):
            raise CodecError(f"not a bit string: {value!r}")
        return bitarray(value)
    return bitarray(list(value))


def encode_binary(n: int) -> bitarray:
    """Returns the binary expansion of n, most significant bit first.

    binary(0) is "0" so that the hat encoding of 0 is well formed.

    Args:
        n (int): A nonnegative integer.

    Returns:
        bitarray: The expansion, of length floor(log2 n) + 1 for n >= 1.
    """

    if n < 0:
        raise ValueError(f"cannot encode negative integer {n}")
    return int2ba(n)


def encode_doubling(n: int) -> bitarray:
    """Returns the doubling encoding of n (each binary digit written twice).

    Args:
        n (int): A nonnegative integer.

    Returns:
        bitarray: The doubled expansion, e.g. 5 -> "110011".
    """

    return bitarray("".join(2 * c for c in encode_binary(n).to01()))


def encode_hat(n: int) -> bitarray:
    """Returns the simple prefix-free (hat) encoding of n.

    The code is doubling(len(binary(n))) + "01" + binary(n); for n >= 1 its
    length is at most 2*floor(log2(floor(log2 n) + 1)) + floor(log2 n) + 5.

    Args:
        n (int): A nonnegative integer.

    Returns:
        bitarray: The hat code, e.g. 5 -> "111101101".
    """

    body = encode_binary(n)
    return encode_doubling(len(body)) + DELIMITER + body


def hat_length(n: int) -> int:
    """Length in bits of `encode_hat(n)`, computed without building it."""

    body = max(n.bit_length(), 1)
    return 2 * body.bit_length() + 2 + body


def hat_length_bound(n: int) -> int:
    """The closed-form upper bound on the hat code length for n >= 1."""

    if n < 1:
        raise ValueError("the bound is stated for n >= 1")
    log_n = n.bit_length() - 1
    return 2 * ((log_n + 1).bit_length() - 1) + log_n + 5


@dataclass(frozen=True)
class PrefixCode:
    """A nonnegative integer together with its hat encoding.

    Attributes:
        value (int): The encoded integer.
        encoding (bitarray): `encode_hat(value)`.
    """

    value: int
    encoding: bitarray

    @classmethod
    def of(cls, value: int) -> "PrefixCode":
        return cls(value, encode_hat(value))

    def __len__(self) -> int:
        return len(self.encoding)


class BitReader:
    """Sequential reader over a bit string.

    Used by the stream decoders and the program parser; reading past the end
    raises `MalformedPrefixError` rather than returning short data.

    Attributes:
        bits (bitarray): The underlying bits.
        pos (int): Index of the next unread bit.
    """

    __slots__ = ("bits", "pos")

    def __init__(
            self,
            bits: bitarray,
            pos: int = 0
            ) -> None:
        self.bits: bitarray = bits
        self.pos: int = pos

    def remaining(self) -> int:
        """Number of unread bits."""

        return len(self.bits) - self.pos

    def at_end(self) -> bool:
        return self.pos >= len(self.bits)

    def read(self, count: int) -> bitarray:
        """Reads exactly `count` bits.

        Raises:
            MalformedPrefixError: If fewer than `count` bits remain.
        """

        if count > self.remaining():
            raise MalformedPrefixError(f"stream exhausted: wanted {count} bits at position {self.pos}, {self.remaining()} left")
        chunk = self.bits[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def rest(self) -> bitarray:
        """Returns the unread suffix without consuming it."""

        return self.bits[self.pos:]

    def read_hat(self) -> int:
        """Reads one hat-encoded integer.

        Returns:
            int: The decoded value.

        Raises:
            MalformedPrefixError: If the doubled-pair region holds a "10" pair,
                the stream ends early, the announced length is zero, or the
                binary part is not canonical.
        """

        start = self.pos
        length_bits = bitarray()
        while True:
            if self.remaining() < 2:
                raise MalformedPrefixError(f"stream exhausted inside the length prefix starting at {start}")
            a, b = self.bits[self.pos], self.bits[self.pos + 1]
            self.pos += 2
            if a == b:
                length_bits.append(a)
            elif a == 0:
                break
            else:
                raise MalformedPrefixError(f"invalid pair '10' at position {self.pos - 2}")

        if len(length_bits) == 0:
            raise MalformedPrefixError(f"empty length prefix at position {start}")
        if len(length_bits) > 1 and length_bits[0] == 0:
            raise MalformedPrefixError(f"non-canonical length prefix at position {start}")
        length = ba2int(length_bits)
        if length == 0:
            raise MalformedPrefixError(f"zero-length binary part at position {start}")

        body = self.read(length)
        if length > 1 and body[0] == 0:
            raise MalformedPrefixError(f"non-canonical binary part at position {start}")
        return ba2int(body)


def decode_hat_stream(s: str | bitarray) -> tuple[int, bitarray]:
    """Decodes the hat code at the front of `s`.

    Args:
        s (str | bitarray): A bit string starting with a hat code.

    Returns:
        tuple[int, bitarray]: The integer and the unconsumed suffix.

    Raises:
        MalformedPrefixError: If `s` does not start with a valid hat code.
    """

    reader = BitReader(as_bits(s))
    value = reader.read_hat()
    return value, reader.rest()


def decode_hat_all(s: str | bitarray) -> list[int]:
    """Decodes a concatenation of hat codes into its integers.

    Raises:
        MalformedPrefixError: If the stream is not an exact concatenation.
    """

    reader = BitReader(as_bits(s))
    values = []
    while not reader.at_end():
        values.append(reader.read_hat())
    return values


def letter_width(k: int) -> int:
    """Bits per letter for an alphabet of size k: floor(log2 k) + 1."""

    if k < 1:
        raise ValueError(f"alphabet size must be at least 1, got {k}")
    return k.bit_length()


def encode_letter_block(
        word: Sequence[int],
        k: int
        ) -> bitarray:
    """Writes a word over {1, ..., k} at fixed width.

    Letter a becomes the binary expansion of a - 1 padded to
    `letter_width(k)` bits; the result has length width * len(word).

    Args:
        word (Sequence[int]): Letters in 1..k.
        k (int): The alphabet size.

    Returns:
        bitarray: The concatenated fixed-width blocks.

    Raises:
        LetterOutOfRangeError: If a letter is outside 1..k.
    """

    width = letter_width(k)
    out = bitarray()
    for letter in word:
        if not 1 <= letter <= k:
            raise LetterOutOfRangeError(f"letter {letter} outside 1..{k}")
        out.extend(int2ba(letter - 1, length=width))
    return out


def decode_letter_block(
        bits: str | bitarray,
        k: int,
        length: int
        ) -> tuple[int, ...]:
    """Inverse of `encode_letter_block` for a word of known length.

    Raises:
        CodecError: If the bit count is not width * length.
        LetterOutOfRangeError: If a block decodes to a letter above k.
    """

    bits = as_bits(bits)
    width = letter_width(k)
    if len(bits) != width * length:
        raise CodecError(f"expected {width * length} bits for {length} letters, got {len(bits)}")
    word = []
    for i in range(length):
        letter = ba2int(bits[i * width:(i + 1) * width]) + 1
        if letter > k:
            raise LetterOutOfRangeError(f"block {i} decodes to letter {letter} outside 1..{k}")
        word.append(letter)
    return tuple(word)

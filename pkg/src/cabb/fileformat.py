"""Line-oriented instance files.

::

    # free-form comments; '# key = value' lines carry generator metadata
    goods 3
    units 1 1 1
    bids 2
    1.5 1 1 0
    2 0 1 1
"""
from __future__ import annotations

import io
import os
from typing import Mapping, TextIO, Union

from .model import (Auction, Bid, DEFAULT_DECIMALS, InstanceError,
                    format_ticks, to_ticks)

PathOrFile = Union[str, os.PathLike, TextIO]


class ParseError(InstanceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def dumps(auction: Auction, metadata: Mapping[str, object] | None = None) -> str:
    out = []
    for key, value in (metadata or {}).items():
        out.append(f"# {key} = {value}")
    out.append(f"goods {auction.num_goods}")
    out.append("units " + " ".join(str(k) for k in auction.stock))
    out.append(f"bids {auction.num_bids}")
    for b in auction.bids:
        price = format_ticks(b.price_ticks, auction.decimals)
        out.append(price + " " + " ".join(str(q) for q in b.quantity))
    return "\n".join(out) + "\n"


def write_instance(auction: Auction, destination: PathOrFile,
                   metadata: Mapping[str, object] | None = None) -> None:
    text = dumps(auction, metadata)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="ascii", newline="\n") as f:
        f.write(text)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", lineno) from None


def loads(text: str, decimals: int = DEFAULT_DECIMALS) -> Auction:
    lines = _content_lines(text)

    def header(word: str):
        try:
            lineno, fields = next(lines)
        except StopIteration:
            raise ParseError(f"missing '{word}' line") from None
        if fields[0] != word:
            raise ParseError(f"expected '{word}', got {fields[0]!r}", lineno)
        return lineno, fields[1:]

    lineno, rest = header("goods")
    if len(rest) != 1:
        raise ParseError("'goods' takes one integer", lineno)
    n = _int(rest[0], lineno, "goods count")
    lineno, rest = header("units")
    if len(rest) != n:
        raise ParseError(f"expected {n} unit counts, got {len(rest)}", lineno)
    stock = tuple(_int(t, lineno, "unit count") for t in rest)
    lineno, rest = header("bids")
    if len(rest) != 1:
        raise ParseError("'bids' takes one integer", lineno)
    m = _int(rest[0], lineno, "bid count")

    bids = []
    for i in range(m):
        try:
            lineno, fields = next(lines)
        except StopIteration:
            raise ParseError(f"expected {m} bids, found {i}") from None
        if len(fields) != n + 1:
            raise ParseError(f"bid {i}: expected price and {n} quantities", lineno)
        try:
            ticks = to_ticks(fields[0], decimals)
        except Exception:
            raise ParseError(f"bid {i}: bad price {fields[0]!r}", lineno) from None
        qty = tuple(_int(t, lineno, "quantity") for t in fields[1:])
        bids.append(Bid(qty, ticks))
    extra = next(lines, None)
    if extra is not None:
        raise ParseError("trailing content after last bid", extra[0])
    return Auction(stock, tuple(bids), decimals)


def read_instance(source: PathOrFile, decimals: int = DEFAULT_DECIMALS) -> Auction:
    if hasattr(source, "read"):
        return loads(source.read(), decimals)
    with open(source, encoding="ascii") as f:
        return loads(f.read(), decimals)


def read_metadata(source: PathOrFile) -> dict[str, str]:
    """Collect the ``# key = value`` comment lines of an instance file."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="ascii") as f:
            text = f.read()
    meta = {}
    for raw in io.StringIO(text):
        raw = raw.strip()
        if raw.startswith("#") and "=" in raw:
            key, value = raw[1:].split("=", 1)
            meta[key.strip()] = value.strip()
    return meta

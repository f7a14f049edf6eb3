"""Regenerates the pinned wire-format fixtures with struct/zlib only."""
import struct
import zlib
from pathlib import Path

HERE = Path(__file__).parent


def batch_frame(n, t, c, samples, labels):
    header = b"PPDA" + struct.pack("<HIIIH", 1, n, t, c, 1)
    payload = struct.pack(f"<{len(samples)}f", *samples)
    tail = struct.pack(f"<{len(labels)}I", *labels)
    crc = zlib.crc32(payload + tail) & 0xFFFFFFFF
    return header + payload + tail + struct.pack("<I", crc)


def rewards(entries):
    body = b"REWD" + struct.pack("<HI", 1, len(entries))
    for index, reward in entries:
        body += struct.pack("<If", index, reward)
    return body


def message(body):
    return struct.pack("<I", len(body)) + body


small = batch_frame(2, 3, 3, [i * 0.5 - 1.0 for i in range(18)], [4, 7])
(HERE / "batch_small.bin").write_bytes(small)
(HERE / "batch_empty.bin").write_bytes(batch_frame(0, 100, 12, [], []))
(HERE / "rewards.bin").write_bytes(rewards([(3, 0.25), (809, -1.5)]))
(HERE / "stream_small.bin").write_bytes(message(struct.pack("<I", 17) + small))

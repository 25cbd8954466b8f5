# Copyright 2026 The Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""SCX matrix files and manifest.json."""

import json
import math
import pathlib
import struct

import numpy as np

MAGIC = b"SCX1"
MAX_RANK = 8
FORMAT_VERSION = 1
MAP_CONVENTION = "ssim_difference_unit_interval"


class ScxError(ValueError):
  """Malformed or inconsistent SCX artifact."""


def write_matrix(dims, values, path):
  dims = [int(d) for d in dims]
  if not dims or len(dims) > MAX_RANK:
    raise ScxError(f"invalid rank {len(dims)}")
  if any(d == 0 for d in dims) and len(dims) != 1:
    raise ScxError("invalid dims: zero extent allowed only as rank-1 [0]")
  values = np.ascontiguousarray(values, dtype="<f4").reshape(-1)
  if values.size != math.prod(dims):
    raise ScxError(f"dimension mismatch: dims {dims} vs {values.size} values")
  if not np.all(np.isfinite(values)):
    raise ScxError("non-finite value")
  path = pathlib.Path(path)
  with open(path, "wb") as f:
    f.write(MAGIC)
    f.write(struct.pack(f"<{len(dims) + 1}I", len(dims), *dims))
    f.write(values.tobytes())
  return path


def read_matrix(path):
  data = pathlib.Path(path).read_bytes()
  if len(data) < 4:
    raise ScxError("truncated header")
  if data[:4] != MAGIC:
    raise ScxError("bad magic")
  if len(data) < 8:
    raise ScxError("truncated header")
  (rank,) = struct.unpack_from("<I", data, 4)
  if rank == 0 or rank > MAX_RANK:
    raise ScxError(f"invalid rank {rank}")
  header = 8 + 4 * rank
  if len(data) < header:
    raise ScxError("truncated header")
  dims = list(struct.unpack_from(f"<{rank}I", data, 8))
  if any(d == 0 for d in dims) and rank != 1:
    raise ScxError("invalid dims: zero extent allowed only as rank-1 [0]")
  count = math.prod(dims)
  payload = len(data) - header
  if count * 4 > payload:
    raise ScxError("truncated payload")
  if count * 4 < payload:
    raise ScxError("trailing bytes after payload")
  values = np.frombuffer(data, dtype="<f4", offset=header, count=count)
  if not np.all(np.isfinite(values)):
    raise ScxError("non-finite value")
  return dims, values.reshape(dims).copy()


def make_manifest(channels, num_codes, map_height, map_width, alpha,
                  truncation, provenance, excluded_layers=()):
  manifest = {
      "format_version": FORMAT_VERSION,
      "num_channels": len(channels),
      "num_codes": int(num_codes),
      "map_height": int(map_height),
      "map_width": int(map_width),
      "map_convention": MAP_CONVENTION,
      "channels": [{"layer": int(l), "channel": int(c)} for l, c in channels],
      "alpha": float(alpha),
      "truncation": float(truncation),
      "provenance": provenance,
  }
  if excluded_layers:
    manifest["excluded_layers"] = [int(l) for l in excluded_layers]
  validate_manifest(manifest)
  return manifest


def validate_manifest(manifest):
  try:
    if manifest["format_version"] != FORMAT_VERSION:
      raise ScxError(
          f"unsupported format_version {manifest['format_version']}")
    channels = [(c["layer"], c["channel"]) for c in manifest["channels"]]
    num_channels = manifest["num_channels"]
    num_codes = manifest["num_codes"]
    height, width = manifest["map_height"], manifest["map_width"]
  except KeyError as e:
    raise ScxError(f"manifest missing key {e}") from None
  if manifest.get("map_convention", MAP_CONVENTION) != MAP_CONVENTION:
    raise ScxError("unsupported map_convention")
  if num_channels < 1 or num_channels != len(channels):
    raise ScxError("num_channels must equal the length of channels")
  if len(set(channels)) != len(channels):
    raise ScxError("duplicate channel")
  if num_codes < 1:
    raise ScxError("num_codes must be >= 1")
  if height < 1 or width < 1:
    raise ScxError("map dimensions must be >= 1")
  for key in ("alpha", "truncation"):
    if not math.isfinite(manifest.get(key, 0.0)):
      raise ScxError("alpha and truncation must be finite")


def write_manifest(manifest, directory):
  validate_manifest(manifest)
  path = pathlib.Path(directory) / "manifest.json"
  path.write_text(json.dumps(manifest, indent=2) + "\n")
  return path


def read_manifest(directory):
  path = pathlib.Path(directory) / "manifest.json"
  if not path.exists():
    raise ScxError(f"missing artifact: {path}")
  try:
    manifest = json.loads(path.read_text())
  except json.JSONDecodeError as e:
    raise ScxError(f"manifest.json: malformed JSON: {e}") from None
  validate_manifest(manifest)
  return manifest

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

import json
import os
import pathlib
import subprocess

import numpy as np
import pytest

from stylecover_extractor import (ExtractionConfig, ScxError, extract,
                                  read_matrix, verify, write_matrix)


class ToyRenderer:
  """Each channel brightens or darkens its own square of a noise image."""

  def __init__(self, size=20, layers=2, per_layer=2):
    self.size = size
    self._channels = [(l, c) for l in range(layers) for c in range(per_layer)]

  def channels(self):
    return self._channels

  def sample_codes(self, n, truncation, rng):
    return [rng.uniform(64, 192, (self.size, self.size)) for _ in range(n)]

  def render(self, code, channel, delta):
    k = self._channels.index(channel)
    img = code.copy()
    r0 = (k // 2) * (self.size // 2)
    c0 = (k % 2) * (self.size // 2)
    img[r0:r0 + self.size // 2, c0:c0 + self.size // 2] += 3.0 * delta
    return np.clip(img, 0, 255)


def test_matrix_round_trip(tmp_path):
  values = np.array([[1, 0], [0, 1]], dtype=np.float32)
  write_matrix([2, 2], values, tmp_path / "m.scx")
  dims, got = read_matrix(tmp_path / "m.scx")
  assert dims == [2, 2]
  assert got.tobytes() == values.tobytes()


def test_empty_matrix(tmp_path):
  write_matrix([0], [], tmp_path / "e.scx")
  dims, got = read_matrix(tmp_path / "e.scx")
  assert dims == [0] and got.size == 0


@pytest.mark.parametrize("mutate,message", [
    (lambda b: b[:-4], "truncated payload"),
    (lambda b: b"XCX1" + b[4:], "bad magic"),
    (lambda b: b[:12] + np.float32(np.nan).tobytes() + b[16:], "non-finite"),
])
def test_corruption_detected(tmp_path, mutate, message):
  path = tmp_path / "m.scx"
  write_matrix([2], [1.0, 2.0], path)
  path.write_bytes(mutate(path.read_bytes()))
  with pytest.raises(ScxError, match=message):
    read_matrix(path)


def test_config_validation():
  for bad in (dict(num_codes=0), dict(alpha=0.0), dict(truncation=1.5)):
    with pytest.raises(ScxError):
      ExtractionConfig(**bad).validate()


def test_default_config_echoed(tmp_path):
  cfg = ExtractionConfig(out=tmp_path, num_codes=2)
  extract(cfg, ToyRenderer(size=12, layers=1, per_layer=1))
  manifest = json.loads((tmp_path / "manifest.json").read_text())
  assert manifest["alpha"] == 20.0
  assert manifest["truncation"] == 0.7
  assert ExtractionConfig().num_codes == 128


def test_zero_perturbation_gives_identical_pairs(tmp_path):
  class Still(ToyRenderer):
    def render(self, code, channel, delta):
      return super().render(code, channel, 0.0)

  extract(ExtractionConfig(out=tmp_path, num_codes=2), Still(size=12),
          reward_fn=lambda a, b: float(np.abs(a - b).mean()))
  _, pairs = read_matrix(tmp_path / "pairs.scx")
  assert np.array_equal(pairs[:, :, 0], pairs[:, :, 1])
  _, rewards = read_matrix(tmp_path / "rewards.scx")
  assert np.all(rewards == 0)


def test_verify_flags_problems(tmp_path):
  cfg = ExtractionConfig(out=tmp_path, num_codes=2)
  extract(cfg, ToyRenderer(size=12))
  assert verify(tmp_path, cfg) == []
  assert any("alpha mismatch" in p
             for p in verify(tmp_path, ExtractionConfig(num_codes=2, alpha=5)))
  path = tmp_path / "pairs.scx"
  path.write_bytes(b"XCX1" + path.read_bytes()[4:])
  assert any("bad magic" in p for p in verify(tmp_path))


def test_missing_checkpoint_loader(tmp_path):
  with pytest.raises(NotImplementedError):
    extract(ExtractionConfig(out=tmp_path, num_codes=1))


@pytest.mark.skipif("STYLECOVER_BIN" not in os.environ,
                    reason="STYLECOVER_BIN not set")
def test_engine_accepts_extractor_output(tmp_path):
  tool = os.environ["STYLECOVER_BIN"]
  extract(ExtractionConfig(out=tmp_path, num_codes=3), ToyRenderer(),
          reward_fn=lambda a, b: float(np.abs(a - b).mean()) / 255.0)

  def run(*args):
    subprocess.run([tool, *args, str(tmp_path)], check=True,
                   capture_output=True)

  run("signatures", "--window", "uniform", "--window-size", "3")
  run("distances")
  run("cluster", "--threshold", "0.5")
  run("select", "-n", "4")
  assert verify(tmp_path) == []
  selection = json.loads((tmp_path / "selection.json").read_text())
  assert len(selection["order"]) == 4
  assert selection["distinct_clusters"] == 4
  clusters = json.loads((tmp_path / "clusters.json").read_text())
  assert len({c for c in clusters["assignment"]}) == 4

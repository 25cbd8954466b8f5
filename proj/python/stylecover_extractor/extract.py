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

"""Renders perturbed image pairs per style channel into an SCX dataset."""

import dataclasses
import math
import pathlib
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from stylecover_extractor import scx


@dataclasses.dataclass
class ExtractionConfig:
  checkpoint: Optional[pathlib.Path] = None
  num_codes: int = 128
  alpha: float = 20.0
  truncation: float = 0.7
  exclude_rgb_layers: bool = True
  exclude_last_blocks: int = 4
  out: pathlib.Path = pathlib.Path("dataset")
  device: str = "cpu"
  batch_size: int = 16
  seed: int = 0

  def validate(self):
    if self.num_codes < 1:
      raise scx.ScxError("num_codes must be >= 1")
    if not self.alpha > 0:
      raise scx.ScxError("alpha must be > 0")
    if not 0 < self.truncation <= 1:
      raise scx.ScxError("truncation must be in (0, 1]")
    if self.batch_size < 1:
      raise scx.ScxError("batch_size must be >= 1")


class Renderer(Protocol):
  """A generator with an addressable style space.

  channels() lists the (layer, channel) pairs to perturb, already filtered by
  the layer excludes. sample_codes(n, truncation, rng) returns n style codes.
  render(code, channel, delta) returns a grayscale image in [0, 255] with the
  given channel of the style code shifted by delta.
  """

  def channels(self) -> Sequence[tuple]:
    ...

  def sample_codes(self, n: int, truncation: float,
                   rng: np.random.Generator) -> Sequence:
    ...

  def render(self, code, channel: tuple, delta: float) -> np.ndarray:
    ...


def load_checkpoint(cfg: ExtractionConfig) -> Renderer:
  raise NotImplementedError(
      "pretrained checkpoints are loaded by a site-specific Renderer; pass one "
      "to extract()")


def extract(cfg: ExtractionConfig,
            renderer: Optional[Renderer] = None,
            reward_fn: Optional[Callable[[np.ndarray, np.ndarray],
                                         float]] = None) -> pathlib.Path:
  """Writes manifest.json and pairs.scx (dims [V, M, 2, H, W]).

  With reward_fn, also writes rewards.scx as the mean of reward_fn over the
  (+alpha, -alpha) pairs of each channel. Difference maps are then produced
  by `stylecover signatures`.
  """
  cfg.validate()
  if renderer is None:
    renderer = load_checkpoint(cfg)
  channels = list(renderer.channels())
  if not channels:
    raise scx.ScxError("no channels left after layer excludes")
  rng = np.random.default_rng(cfg.seed)
  codes = list(renderer.sample_codes(cfg.num_codes, cfg.truncation, rng))
  if len(codes) != cfg.num_codes:
    raise scx.ScxError("renderer returned the wrong number of codes")

  pairs = None
  rewards = np.zeros(len(channels), dtype=np.float64)
  for v, channel in enumerate(channels):
    for m, code in enumerate(codes):
      plus = np.asarray(renderer.render(code, channel, +cfg.alpha), np.float32)
      minus = np.asarray(renderer.render(code, channel, -cfg.alpha), np.float32)
      if plus.ndim != 2 or plus.shape != minus.shape:
        raise scx.ScxError("renderer must return equal-sized grayscale images")
      if pairs is None:
        pairs = np.empty((len(channels), len(codes), 2) + plus.shape,
                         dtype=np.float32)
      elif pairs.shape[3:] != plus.shape:
        raise scx.ScxError("renderer image size changed between calls")
      pairs[v, m, 0] = plus
      pairs[v, m, 1] = minus
      if reward_fn is not None:
        rewards[v] += reward_fn(plus, minus) / len(codes)

  out = pathlib.Path(cfg.out)
  out.mkdir(parents=True, exist_ok=True)
  height, width = pairs.shape[3:]
  manifest = scx.make_manifest(
      channels, len(codes), height, width, cfg.alpha, cfg.truncation,
      f"extractor, checkpoint {cfg.checkpoint}, seed {cfg.seed}")
  scx.write_manifest(manifest, out)
  scx.write_matrix(pairs.shape, pairs, out / "pairs.scx")
  if reward_fn is not None:
    if np.any(rewards < 0):
      raise scx.ScxError("negative reward")
    scx.write_matrix([len(channels)], rewards, out / "rewards.scx")
  return out


def verify(directory, cfg: Optional[ExtractionConfig] = None) -> list:
  """Returns a list of problems; empty means the dataset is clean."""
  directory = pathlib.Path(directory)
  problems = []
  try:
    manifest = scx.read_manifest(directory)
  except scx.ScxError as e:
    return [str(e)]
  v, m = manifest["num_channels"], manifest["num_codes"]
  hw = manifest["map_height"] * manifest["map_width"]
  expected = {
      "signatures.scx": [v, m, hw],
      "rewards.scx": [v],
      "pairs.scx": None,
  }
  for name, dims in expected.items():
    path = directory / name
    if not path.exists():
      continue
    try:
      got, values = scx.read_matrix(path)
    except scx.ScxError as e:
      problems.append(f"{name}: {e}")
      continue
    if name == "pairs.scx":
      if len(got) != 5 or got[:3] != [v, m, 2]:
        problems.append(f"{name}: dims {got} do not match [V, M, 2, H, W]")
    elif got != dims:
      problems.append(f"{name}: dims {got}, manifest implies {dims}")
    elif name == "rewards.scx" and np.any(values < 0):
      problems.append(f"{name}: negative reward")
    elif name == "signatures.scx" and (np.any(values < 0) or
                                       np.any(values > 1)):
      problems.append(f"{name}: value out of [0,1]")
  if not (directory / "signatures.scx").exists() and not (
      directory / "pairs.scx").exists():
    problems.append("neither signatures.scx nor pairs.scx present")
  if cfg is not None:
    if not math.isclose(manifest.get("alpha", math.nan), cfg.alpha):
      problems.append(
          f"alpha mismatch: manifest {manifest.get('alpha')}, config {cfg.alpha}")
    if manifest["num_codes"] != cfg.num_codes:
      problems.append("num_codes mismatch between manifest and config")
  return problems

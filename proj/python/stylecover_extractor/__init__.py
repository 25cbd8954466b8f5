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

"""Producers of SCX datasets from a pretrained generator."""

from stylecover_extractor.extract import (
    ExtractionConfig,
    Renderer,
    extract,
    load_checkpoint,
    verify,
)
from stylecover_extractor.scx import (
    ScxError,
    read_manifest,
    read_matrix,
    write_manifest,
    write_matrix,
)

__all__ = [
    "ExtractionConfig",
    "Renderer",
    "ScxError",
    "extract",
    "load_checkpoint",
    "read_manifest",
    "read_matrix",
    "verify",
    "write_manifest",
    "write_matrix",
]

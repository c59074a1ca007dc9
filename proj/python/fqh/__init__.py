# Copyright 2026 The fqh Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Fluctuating quantum heat of projective energy measurements."""

from ._core import (
    analyze,
    eigenstate_distribution,
    full_cg_distribution,
    partial_cg_distribution,
    sample,
    skew_information,
    sweep,
    two_qubit_example,
)

__all__ = [
    "analyze",
    "eigenstate_distribution",
    "full_cg_distribution",
    "partial_cg_distribution",
    "sample",
    "skew_information",
    "sweep",
    "two_qubit_example",
]

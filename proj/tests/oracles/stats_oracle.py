#!/usr/bin/env python3
# Copyright 2026 The mmqa Authors
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

"""Independent statistics oracle for a JSONL example file.

Usage: stats_oracle.py DATASET.jsonl > GOLDEN.json
"""

import json
import re
import string
import sys

_SPLIT = re.compile("[" + re.escape(string.whitespace + string.punctuation) + "]+")


def words(text):
    raw = text.encode("utf-8")
    table = bytes(range(256)).lower()
    return [w.decode("utf-8") for w in re.split(_SPLIT.pattern.encode(), raw.translate(table)) if w]


def pct(part, whole):
    return 100.0 * part / whole if whole else 0.0


def main(path):
    with open(path, encoding="utf-8") as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    n = len(rows)
    by_split = {}
    for key, members in (("train", ("train",)), ("dev", ("dev",)), ("test", ("test",)),
                         ("dev+test", ("dev", "test"))):
        chosen = [r for r in rows if r.get("split") in members]
        by_split[key] = {
            "n": len(chosen),
            "pct_multimodal": pct(sum(1 for r in chosen if r["multimodal"]), len(chosen)),
            "pct_compositional": pct(sum(1 for r in chosen if r["compositional"]), len(chosen)),
        }
    qwords, awords = set(), set()
    qlen = 0
    answer_strings = []
    for r in rows:
        q = r["nl_question"] if r.get("nl_question") else r["pl_question"]
        w = words(q)
        qlen += len(w)
        qwords.update(w)
        answer_strings.extend(r["answers"]["values"])
    alen = 0
    for a in answer_strings:
        w = words(a)
        alen += len(w)
        awords.update(w)
    inter = [r for r in rows if r.get("intermediate_answers")]
    out = {
        "n_questions": n,
        "by_split": by_split,
        "avg_question_length": qlen / n,
        "avg_answers_per_question": len(answer_strings) / n,
        "pct_list_answers": pct(sum(1 for r in rows if len(r["answers"]["values"]) > 1), n),
        "pct_list_intermediate": pct(sum(1 for r in inter if len(r["intermediate_answers"]["values"]) > 1), len(inter)),
        "avg_answer_length": alen / len(answer_strings) if answer_strings else 0.0,
        "distinct_question_words": len(qwords),
        "distinct_answer_words": len(awords),
        "distinct_tables": len({r["context"]["context_id"] for r in rows}),
    }
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])

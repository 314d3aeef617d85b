#!/usr/bin/env python3
# Copyright 2026 The HybridTree Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts the UCI Adult census files into numeric libsvm files.

Continuous attributes are kept as raw values, categorical attributes are
one-hot encoded against the fixed vocabulary published with the dataset
(unknown "?" values encode as all zeros). Labels: 1 for ">50K", 0 otherwise.

The raw files are looked up in --raw-dir; when absent they are extracted from
a PyPI wheel that redistributes them (the `responsibly` package).
"""

import argparse
import glob
import os
import subprocess
import sys
import tempfile
import zipfile

CONTINUOUS = ["age", "fnlwgt", "education-num", "capital-gain",
              "capital-loss", "hours-per-week"]

VOCAB = {
    "workclass": ["Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
                  "Local-gov", "State-gov", "Without-pay", "Never-worked"],
    "education": ["Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
                  "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th",
                  "Masters", "1st-4th", "10th", "Doctorate", "5th-6th",
                  "Preschool"],
    "marital-status": ["Married-civ-spouse", "Divorced", "Never-married",
                       "Separated", "Widowed", "Married-spouse-absent",
                       "Married-AF-spouse"],
    "occupation": ["Tech-support", "Craft-repair", "Other-service", "Sales",
                   "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
                   "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
                   "Transport-moving", "Priv-house-serv", "Protective-serv",
                   "Armed-Forces"],
    "relationship": ["Wife", "Own-child", "Husband", "Not-in-family",
                     "Other-relative", "Unmarried"],
    "race": ["White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other",
             "Black"],
    "sex": ["Female", "Male"],
    "native-country": [
        "United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
        "Germany", "Outlying-US(Guam-USVI-etc)", "India", "Japan", "Greece",
        "South", "China", "Cuba", "Iran", "Honduras", "Philippines", "Italy",
        "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal", "Ireland",
        "France", "Dominican-Republic", "Laos", "Ecuador", "Taiwan", "Haiti",
        "Columbia", "Hungary", "Guatemala", "Nicaragua", "Scotland",
        "Thailand", "Yugoslavia", "El-Salvador", "Trinadad&Tobago", "Peru",
        "Hong", "Holand-Netherlands"],
}

COLUMNS = ["age", "workclass", "fnlwgt", "education", "education-num",
           "marital-status", "occupation", "relationship", "race", "sex",
           "capital-gain", "capital-loss", "hours-per-week", "native-country"]


def feature_layout():
    names = []
    for col in COLUMNS:
        if col in CONTINUOUS:
            names.append(col)
        else:
            names.extend(f"{col}={v}" for v in VOCAB[col])
    return names


def encode_row(fields, index):
    out = {}
    for col, raw in zip(COLUMNS, fields):
        if col in CONTINUOUS:
            value = float(raw)
            if value != 0.0:
                out[index[col]] = value
        elif raw != "?":
            out[index[f"{col}={raw}"]] = 1.0
    return out


def convert(src, dst, index):
    rows = 0
    with open(src) as fin, open(dst, "w") as fout:
        for line in fin:
            line = line.strip()
            if not line or line.startswith("|"):
                continue
            fields = [f.strip() for f in line.split(",")]
            label = 1 if fields[-1].rstrip(".") == ">50K" else 0
            feats = encode_row(fields[:-1], index)
            body = " ".join(f"{k + 1}:{feats[k]:g}" for k in sorted(feats))
            fout.write(f"{label} {body}\n" if body else f"{label}\n")
            rows += 1
    return rows


def fetch_raw(raw_dir):
    os.makedirs(raw_dir, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.check_call([sys.executable, "-m", "pip", "download",
                               "--no-deps", "-q", "responsibly==0.1.2",
                               "-d", tmp])
        wheel = glob.glob(os.path.join(tmp, "responsibly-*.whl"))[0]
        with zipfile.ZipFile(wheel) as z:
            for name in ("adult.data", "adult.test"):
                with open(os.path.join(raw_dir, name), "wb") as f:
                    f.write(z.read(f"responsibly/dataset/adult/{name}"))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--raw-dir", default="data/adult/raw")
    parser.add_argument("--out-dir", default="data/adult")
    args = parser.parse_args()

    if not os.path.exists(os.path.join(args.raw_dir, "adult.data")):
        fetch_raw(args.raw_dir)

    names = feature_layout()
    index = {n: i for i, n in enumerate(names)}
    os.makedirs(args.out_dir, exist_ok=True)
    n_train = convert(os.path.join(args.raw_dir, "adult.data"),
                      os.path.join(args.out_dir, "adult.train.libsvm"), index)
    n_test = convert(os.path.join(args.raw_dir, "adult.test"),
                     os.path.join(args.out_dir, "adult.test.libsvm"), index)
    with open(os.path.join(args.out_dir, "features.txt"), "w") as f:
        f.write("\n".join(names) + "\n")
    print(f"train={n_train} test={n_test} features={len(names)}")


if __name__ == "__main__":
    main()

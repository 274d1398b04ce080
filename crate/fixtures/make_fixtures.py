"""Regenerates the fixture datasets with NumPy as the reference encoder.

Run from this directory: python3 make_fixtures.py
"""
import json
import os
import shutil

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

README = """# {title}

{blurb}

## Citation

### Original Source

```bibtex
@misc{{{key}-original,
  title = {{{title}: original collection}},
  year = {{2000}}
}}
```

### Current Version

```bibtex
@misc{{{key}-current,
  title = {{{title}: current release}},
  year = {{2016}}
}}
```

### Previous Versions

```bibtex
@misc{{{key}-previous,
  title = {{{title}: earlier revision}},
  year = {{2008}}
}}
```
"""

LICENSE = "Creative Commons Attribution 4.0 International (CC BY 4.0)\n"


def ref(file, key, description="", dtype=None, fmt="Tensor"):
    entry = {"description": description}
    if dtype is not None:
        entry["type"] = dtype
    entry["format"] = fmt
    entry["file"] = file
    entry["key"] = key
    return entry


def dataset(name, metadata, arrays, tasks, task_arrays=None, blurb="Fixture dataset."):
    d = os.path.join(HERE, name)
    shutil.rmtree(d, ignore_errors=True)
    os.makedirs(d)
    np.savez(os.path.join(d, f"{name}.npz"), **arrays)
    files = [f"{name}.npz"]
    if task_arrays:
        np.savez(os.path.join(d, f"{name}_task.npz"), **task_arrays)
        files.append(f"{name}_task.npz")
    with open(os.path.join(d, "metadata.json"), "w") as f:
        json.dump(metadata, f, indent=2)
        f.write("\n")
    for fname, task in tasks.items():
        with open(os.path.join(d, f"task_{fname}.json"), "w") as f:
            json.dump(task, f, indent=2)
            f.write("\n")
    with open(os.path.join(d, "README.md"), "w") as f:
        f.write(README.format(title=name, key=name, blurb=blurb))
    with open(os.path.join(d, "LICENSE"), "w") as f:
        f.write(LICENSE)
    with open(os.path.join(d, "urls.json"), "w") as f:
        json.dump({fn: f"https://example.org/gli/{name}/{fn}" for fn in files}, f, indent=2)
        f.write("\n")


def triangle():
    f = "triangle.npz"
    dataset(
        "triangle",
        {
            "description": "Three mutually linked nodes.",
            "is_directed": False,
            "data": {
                "Node": {
                    "NodeFeature": ref(f, "node_feats", "two-dimensional features", "float32"),
                    "NodeLabel": ref(f, "node_class", "binary class", "int64"),
                },
                "Edge": {"_Edge": ref(f, "edge")},
            },
            "citation": "@misc{triangle-current, title = {triangle}}",
        },
        {
            "node_feats": np.array([[1, 0], [1, 0], [0, 1]], dtype=np.float32),
            "node_class": np.array([0, 0, 1], dtype=np.int64),
            "edge": np.array([[0, 1], [1, 2], [2, 0]], dtype=np.int64),
        },
        {
            "node_classification": {
                "description": "Predict the class of each node.",
                "type": "NodeClassification",
                "feature": ["Node/NodeFeature"],
                "target": "Node/NodeLabel",
                "num_classes": 2,
                "train_set": {"file": "triangle_task.npz", "key": "train"},
                "val_set": {"file": "triangle_task.npz", "key": "val"},
                "test_set": {"file": "triangle_task.npz", "key": "test"},
            }
        },
        {
            "train": np.array([0], dtype=np.int64),
            "val": np.array([1], dtype=np.int64),
            "test": np.array([2], dtype=np.int64),
        },
    )


def square():
    f = "square.npz"
    dataset(
        "square",
        {
            "description": "A 4-cycle 0-1-2-3-0 with two classes.",
            "is_directed": False,
            "data": {
                "Node": {
                    "_NodeList": ref(f, "nodes"),
                    "NodeFeature": ref(f, "x", "features", "float64"),
                    "NodeLabel": ref(f, "y", "class", "int64"),
                    "NodeValue": ref(f, "value", "regression target", "float64"),
                },
                "Edge": {"_Edge": ref(f, "edge"), "EdgeWeight": ref(f, "w", "weights", "float")},
            },
        },
        {
            "nodes": np.arange(4, dtype=np.int64),
            "x": np.array([[1.0, 0.0], [1.0, 0.1], [0.0, 1.0], [0.1, 1.0]]),
            "y": np.array([0, 0, 1, 1], dtype=np.int64),
            "value": np.array([0.5, 1.5, 2.5, 3.5]),
            "edge": np.array([[0, 1], [1, 2], [2, 3], [3, 0]], dtype=np.int64),
            "w": np.array([1.0, 2.0, 3.0, 4.0], dtype=np.float32),
        },
        {
            "node_regression": {
                "description": "Regress a node value.",
                "type": "NodeRegression",
                "feature": ["Node/NodeFeature"],
                "target": "Node/NodeValue",
                "train_ratio": 0.5,
                "val_ratio": 0.25,
                "test_ratio": 0.25,
                "seed": 7,
                "num_splits": 2,
            },
            "link_prediction": {
                "description": "Predict held-out edges.",
                "type": "LinkPrediction",
                "feature": ["Node/NodeFeature"],
                "train_set": {"file": "square_task.npz", "key": "train"},
                "val_set": {"file": "square_task.npz", "key": "val"},
                "test_set": {"file": "square_task.npz", "key": "test"},
                "val_neg": {"file": "square_task.npz", "key": "val_neg"},
                "test_neg": {"file": "square_task.npz", "key": "test_neg"},
            },
        },
        {
            "train": np.array([True, True, False, False]),
            "val": np.array([False, False, True, False]),
            "test": np.array([False, False, False, True]),
            "val_neg": np.array([[0, 2]], dtype=np.int64),
            "test_neg": np.array([[1, 3]], dtype=np.int64),
        },
    )


def multigraph():
    f = "multigraph.npz"
    dataset(
        "multigraph",
        {
            "description": "Two triangles, each its own graph.",
            "is_directed": False,
            "data": {
                "Node": {"NodeFeature": ref(f, "x", "features", "float32")},
                "Edge": {"_Edge": ref(f, "edge")},
                "Graph": {
                    "_NodeList": ref(f, "node_list", fmt="Tensor"),
                    "_EdgeList": ref(f, "edge_list"),
                    "GraphLabel": ref(f, "glabel", "graph class", "int64"),
                    "GraphValue": ref(f, "gvalue", "graph value", "float64"),
                },
            },
        },
        {
            "x": np.arange(12, dtype=np.float32).reshape(6, 2),
            "edge": np.array([[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]], dtype=np.int64),
            "node_list": np.array([[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]], dtype=bool),
            "edge_list": np.array([0, 0, 0, 1, 1, 1], dtype=np.int64),
            "glabel": np.array([0, 1], dtype=np.int64),
            "gvalue": np.array([0.25, 0.75]),
        },
        {
            "graph_classification": {
                "description": "Classify each graph.",
                "type": "GraphClassification",
                "feature": ["Node/NodeFeature"],
                "target": "Graph/GraphLabel",
                "num_classes": 2,
                "train_ratio": 0.5,
                "val_ratio": 0.5,
                "test_ratio": 0.0,
                "seed": 1,
            },
            "graph_regression": {
                "description": "Regress a graph value.",
                "type": "GraphRegression",
                "feature": ["Node/NodeFeature"],
                "target": "Graph/GraphValue",
                "train_ratio": 0.5,
                "val_ratio": 0.0,
                "test_ratio": 0.5,
                "seed": 2,
            },
        },
    )


def temporal():
    f = "temporal.npz"
    dataset(
        "temporal",
        {
            "description": "Directed interactions with creation years.",
            "is_directed": True,
            "data": {
                "Node": {"_NodeList": ref(f, "nodes")},
                "Edge": {"_Edge": ref(f, "edge"), "EdgeYear": ref(f, "year", "creation year", "int32")},
            },
        },
        {
            "nodes": np.arange(5, dtype=np.int64),
            "edge": np.array([[0, 1], [1, 2], [2, 0], [2, 3], [3, 4], [4, 0]], dtype=np.int64),
            "year": np.array([1999, 2000, 2001, 2002, 2003, 2004], dtype=np.int32),
        },
        {
            "time_link_prediction": {
                "description": "Predict future links.",
                "type": "TimeDependentLinkPrediction",
                "time_attribute": "Edge/EdgeYear",
                "val_time": 2001,
                "test_time": 2003,
            }
        },
    )


def kg():
    f = "kg.npz"
    dataset(
        "kg",
        {
            "description": "A toy knowledge graph of typed triplets.",
            "is_directed": True,
            "data": {
                "Node": {"_NodeList": ref(f, "entities")},
                "Edge": {"_Edge": ref(f, "triplets"), "EdgeRelation": ref(f, "relation", "relation type", "int64")},
            },
        },
        {
            "entities": np.arange(4, dtype=np.int64),
            "triplets": np.array([[0, 1], [1, 2], [2, 3], [3, 0], [0, 2], [1, 3]], dtype=np.int64),
            "relation": np.array([0, 1, 0, 1, 2, 2], dtype=np.int64),
        },
        {
            "entity_prediction": {
                "description": "Predict the tail entity.",
                "type": "KGEntityPrediction",
                "target": "Edge/EdgeRelation",
                "prediction_slot": "tail",
                "train_ratio": 0.5,
                "val_ratio": 0.25,
                "test_ratio": 0.25,
                "seed": 3,
            },
            "relation_prediction": {
                "description": "Predict the relation of a triplet.",
                "type": "KGRelationPrediction",
                "target": "Edge/EdgeRelation",
                "train_ratio": 0.5,
                "val_ratio": 0.25,
                "test_ratio": 0.25,
                "seed": 4,
            },
        },
    )


def hetero():
    f = "hetero.npz"
    dataset(
        "hetero",
        {
            "description": "Papers and their authors.",
            "is_heterogeneous": True,
            "is_directed": True,
            "data": {
                "Node": {
                    "paper": {
                        "_NodeList": ref(f, "paper_ids"),
                        "PaperFeature": ref(f, "paper_x", "bag of words", "float32"),
                        "PaperLabel": ref(f, "paper_y", "venue", "int64"),
                    },
                    "author": {"_NodeList": ref(f, "author_ids")},
                },
                "Edge": {
                    "writes": {"_Edge": ref(f, "writes"), "Position": ref(f, "position", "author position", "int8")},
                    "cites": {"_Edge": ref(f, "cites")},
                },
            },
        },
        {
            "paper_ids": np.arange(0, 3, dtype=np.int64),
            "author_ids": np.arange(3, 5, dtype=np.int64),
            "paper_x": np.eye(3, dtype=np.float32),
            "paper_y": np.array([0, 1, 1], dtype=np.int64),
            "writes": np.array([[3, 0], [3, 1], [4, 1], [4, 2]], dtype=np.int64),
            "position": np.array([0, 0, 1, 0], dtype=np.int8),
            "cites": np.array([[1, 0], [2, 1]], dtype=np.int64),
        },
        {
            "paper_classification": {
                "description": "Predict the venue of each paper.",
                "type": "NodeClassification",
                "feature": ["Node/paper/PaperFeature"],
                "target": "Node/paper/PaperLabel",
                "num_classes": 2,
                "train_ratio": 0.34,
                "val_ratio": 0.33,
                "test_ratio": 0.33,
                "seed": 5,
            }
        },
    )


if __name__ == "__main__":
    triangle()
    square()
    multigraph()
    temporal()
    kg()
    hetero()

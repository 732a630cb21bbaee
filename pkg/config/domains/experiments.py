# config/domains/experiments.py

EXPERIMENT_PRESETS = {
    "desk": {
        "description": "Random paths on small trees, checked against the branch-and-bound oracle.",
        "exact_method": "oracle",
        "generator": {
            "shape": "paths",
            "tree_size_range": (10, 20),
            # scaled down from 2x-4x so the exponential oracle stays tractable
            "subtree_factor_range": (0.5, 1.0),
        },
    },
    "full": {
        "description": "Full-size setting: trees of 50-150 vertices with 2x-4x as many paths. Expect budget_exceeded rows.",
        "exact_method": "shared",
        "generator": {
            "shape": "root-crossing",
            "tree_size_range": (50, 150),
            "subtree_factor_range": (2.0, 4.0),
        },
    },
    "shared": {
        "description": "Directed and root-crossing paths, solved exactly by the shared-vertex plan.",
        "exact_method": "shared",
        "generator": {
            "shape": "root-crossing",
            "tree_size_range": (8, 12),
            "subtree_count_range": (4, 10),
        },
    },
    "data_center": {
        "description": "Leaf-to-leaf requests with unbounded internal vertices and edges.",
        "exact_method": "oracle",
        "generator": {
            "shape": "leaf-to-leaf",
            "tree_size_range": (10, 20),
            "subtree_factor_range": (0.5, 1.0),
        },
    },
    "homogeneous": {
        "description": "Every vertex and edge has the same capacity k.",
        "exact_method": "oracle",
        "generator": {
            "shape": "subtrees",
            "tree_size_range": (8, 12),
            "subtree_count_range": (6, 12),
            "homogeneous_capacity": 2,
        },
    },
}

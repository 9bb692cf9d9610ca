"""Tag similarity, tag-set expansion and resource retrieval over folksonomies."""

from folksim.corpus import (
    Bookmark,
    Folksonomy,
    TagResourceMatrix,
    build_tag_resource_matrix,
    group_bookmarks,
    ingest_assignments,
    read_assignments,
)
from folksim.kernels import get_backend
from folksim.simcore import EngineConfig, SimilarityMatrix, compute_similarities

__all__ = [
    "Bookmark",
    "EngineConfig",
    "Folksonomy",
    "SimilarityMatrix",
    "TagResourceMatrix",
    "build_tag_resource_matrix",
    "compute_similarities",
    "get_backend",
    "group_bookmarks",
    "ingest_assignments",
    "read_assignments",
]

__version__ = "0.1.0"

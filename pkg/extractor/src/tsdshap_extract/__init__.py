"""Feature extraction front end for the valuation engine.

Turns raw text into TSDS binary matrix files, either by pooling the
penultimate hidden layer of a frozen pre-trained transformer or by
averaging pre-trained word vectors.  The engine is consumed purely through
its published file formats; nothing here imports it.
"""

from .formats import read_tsds_header, write_tsds
from .lm import ExtractionSpec, POOLING_MODES, extract_lm_representations
from .wordvec import average_word_vectors, load_vector_table

__version__ = "0.1.0"

__all__ = [
    "ExtractionSpec",
    "POOLING_MODES",
    "average_word_vectors",
    "extract_lm_representations",
    "load_vector_table",
    "read_tsds_header",
    "write_tsds",
    "__version__",
]

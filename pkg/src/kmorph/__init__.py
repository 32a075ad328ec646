"""Korean word-lexicon compiler and morpheme-lattice annotator."""

__version__ = "0.1.0"

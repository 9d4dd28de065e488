//! Minimum spanning forest.

//! Placeholder: run configuration, pipeline, and emission land here.

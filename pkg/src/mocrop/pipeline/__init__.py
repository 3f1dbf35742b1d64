"""Pipeline: per-clip orchestration, synthetic clips, evaluation and benchmarks."""

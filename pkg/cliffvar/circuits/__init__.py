"""Circuit model: gates, layered ansatz, observables and rewrites."""

"""Dense statevector oracle module."""

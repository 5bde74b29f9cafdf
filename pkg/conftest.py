# Ensures the repository root is importable so test modules can share
# helpers via "from tests.conftest import ...".

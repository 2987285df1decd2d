"""Run the schrodinger benchmark end to end and write its data files."""

from experiment import run

if __name__ == "__main__":
    run("schrodinger")

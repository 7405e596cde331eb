from . import analyze, assemble, evaluate, ingest, report, select, synth, textdiv, visdiv

# Registration order is the order shown by --help
COMMANDS = (ingest, synth, textdiv, visdiv, evaluate, assemble, analyze, select, report)

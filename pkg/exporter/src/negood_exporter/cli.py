"""export-embeddings: one input file or image directory to one EMB1 file."""

import argparse
import sys

from .export import DEFAULT_PROMPT, ExportManifest, export


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="export-embeddings", description=__doc__)
    parser.add_argument("--model", required=True, help="hub id or local checkpoint directory")
    parser.add_argument("--kind", required=True, choices=["labels", "corpus", "images"])
    parser.add_argument("--input", required=True)
    parser.add_argument("--prompt", default=DEFAULT_PROMPT)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    manifest = ExportManifest(
        model_name=args.model,
        inputs=((args.kind, args.input),),
        outputs=(args.out,),
        prompt_template=args.prompt,
    )
    written = export(manifest)
    print(f"wrote {written[0]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..dataset.manifest import read_manifest
from ..synth import SynthSpec, contingency_table, load_specs, micro_corpus_specs, write_corpus
from .workerbase import WorkerBase

logger = logging.getLogger(__name__)


class SynthWorker(WorkerBase):
    """The SynthWorker class writes a synthetic corpus next to the
    configured manifest: the seeded micro-corpus by default, or the clips
    of an explicit spec file."""

    command = "synth"

    def __init__(self, config, spec_path: Optional[Path] = None):
        super().__init__(config)
        self.spec_path = spec_path

    def _gather(self) -> List[SynthSpec]:
        if self.spec_path:
            return load_specs(self.spec_path)
        synth = self.config.synth
        return micro_corpus_specs(synth.seed, synth.sample_rate, synth.duration)

    def _process(self, specs: List[SynthSpec]) -> Dict[str, Any]:
        target = self.config.paths.manifest
        manifest = write_corpus(specs, target.parent, target.name)
        table = contingency_table(read_manifest(manifest))
        return {
            "manifest": str(manifest),
            "clips": len(specs),
            "contingency": {
                event: {scene: int(count) for scene, count in row.items()}
                for event, row in table.iterrows()
            },
        }

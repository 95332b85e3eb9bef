import os

import graphviz
from rich import print

from ..model_zoo import ModelSpec, infer_shapes

LAYER_COLORS = {
    "input": "lightblue",
    "conv": "gold",
    "maxpool": "lightgrey",
    "activation": "white",
    "maxout": "orange",
    "dropout": "pink",
    "dense": "palegreen",
    "softmax": "lightblue",
}


class ArchitectureGraphPlot:
    """Renders the resolved shape chain of a ModelSpec as a flowchart.

    The DOT source is always written next to the image so the diagram
    can be re-rendered when the graphviz binaries are missing.
    """

    def __init__(self, spec: ModelSpec, out_dir: str,
                 name: str = "architecture") -> None:
        self.spec = spec
        self.out_dir = out_dir
        self.name = name
        self.dot = self.build_graph()

    def build_graph(self) -> graphviz.Digraph:
        dot = graphviz.Digraph(comment=f'{self.spec.name} architecture',
                               format='png')
        dot.attr(rankdir='TB', nodesep='0.4', fontsize='11')
        chain = infer_shapes(self.spec)
        previous = None
        for index, (layer, shape) in enumerate(zip(self.spec.layers, chain)):
            node = f"layer_{index}"
            dims = "x".join(str(d) for d in shape)
            dot.node(node, label=f"{layer.describe()}\n{dims}",
                     shape='rectangle', style='filled',
                     fillcolor=LAYER_COLORS.get(layer.kind, 'white'))
            if previous is not None:
                dot.edge(previous, node)
            previous = node
        return dot

    @property
    def source_path(self) -> str:
        return os.path.join(self.out_dir, f"{self.name}.gv")

    def render(self) -> bool:
        os.makedirs(self.out_dir, exist_ok=True)
        with open(self.source_path, "w") as f:
            f.write(self.dot.source)
        try:
            self.dot.render(os.path.join(self.out_dir, self.name),
                            cleanup=True)
            print(f"Architecture diagram generated as "
                  f"{os.path.join(self.out_dir, self.name)}.png")
            return True
        except Exception as e:
            print(f"Error generating architecture diagram: {e}")
            return False

// Trains a checklist on the bundled heart data and prints it.
//
//   ./quickstart [path/to/heart.csv path/to/heart.schema.json]

#include <iostream>

#include "checklist/checklist.hpp"

using namespace checklist;

int main(int argc, char** argv) {
  const std::string csv = argc > 1 ? argv[1] : "data/heart.csv";
  const std::string schema = argc > 2 ? argv[2] : "data/heart.schema.json";
  try {
    const auto table = make_table(load_csv(csv), schema_from_json(load_json(schema)));

    PipelineConfig pipe;
    pipe.complements = ComplementMode::All;
    const auto bin = fit_binarization(table, pipe);
    const auto data = materialize(table, bin);

    TrainConfig cfg;
    cfg.constraints.max_items = 6;
    cfg.constraints.one_per_group = true;
    cfg.solve.time_limit = 20;
    const auto r = train(data, cfg);
    if (!r.checklist) {
      std::cerr << r.status << ": " << r.message << "\n";
      return 2;
    }

    const auto stats = confusion(*r.checklist, data);
    std::cout << render_card(*r.checklist, "heart disease");
    std::cout << "training error " << *stats.error() << ", optimality gap " << r.solve->gap << "\n";
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

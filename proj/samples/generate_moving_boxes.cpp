// Copyright 2026 The edgepar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Writes a synthetic MOT ground-truth file of translating boxes, usable both
// as ground truth and as a perfect-replay detections file.
//
//   generate_moving_boxes OUT.txt [frames] [objects] [seed]

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "edgepar/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argv[1][0] == '-') {
    std::cerr << "usage: " << argv[0] << " OUT.txt [frames] [objects] [seed]\n";
    return 2;
  }
  edgepar::synthetic::SceneConfig scene;
  if (argc > 2) scene.frames = std::atoll(argv[2]);
  if (argc > 3) scene.objects = std::atoi(argv[3]);
  if (argc > 4) scene.seed = std::strtoull(argv[4], nullptr, 10);
  try {
    const auto records = edgepar::synthetic::moving_boxes(scene);
    std::ofstream out(argv[1]);
    if (!out) {
      std::cerr << "cannot write " << argv[1] << '\n';
      return 1;
    }
    edgepar::synthetic::write_mot(out, records);
    std::cout << "wrote " << records.size() << " boxes over " << scene.frames
              << " frames to " << argv[1] << '\n';
  } catch (const edgepar::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

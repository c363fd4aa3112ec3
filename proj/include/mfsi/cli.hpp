#pragma once

namespace mfsi {

int run_cli(int argc, char** argv);

} // namespace mfsi

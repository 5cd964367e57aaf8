int flag;
int seen;

void *reader(void *arg) {
  seen = flag;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, reader, 0);
  flag = 1;
  pthread_join(t, 0);
  return seen;
}
